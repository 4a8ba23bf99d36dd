use std::fmt;

use crate::gentree::{transition_matrix, TransitionMatrix};
use crate::induction::{CompressedRules, FamilyLink, FamilyTemplate, GeneralRule};
use crate::perm::Permutation;

/// Shape of the label digraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphFamily {
    Finite {
        matrix: TransitionMatrix,
    },
    /// One chain `v_0 -> v_1 -> ...`, every other edge touching `W`.
    AlmostPathDirected {
        chain: FamilyTemplate,
        w: Vec<Permutation>,
        m: usize,
        extended_w: bool,
    },
    /// One chain where `v_j` also points back to every `v_i`, `i < j`, and
    /// carries `a_loops` loops.
    BackwardPathDirected {
        chain: FamilyTemplate,
        w: Vec<Permutation>,
        a_loops: u64,
        m: usize,
        extended_w: bool,
    },
    /// `α` parallel families. `families` lists the distinct (collapsed)
    /// families in schema order; `alpha` counts label paths, so two
    /// isomorphic paths sharing a family count twice.
    AlphaGrowing {
        alpha: usize,
        families: Vec<FamilyTemplate>,
        /// `s'` for each family in schema order (the first and last entries
        /// are the first family itself and `α'`).
        routing: Vec<usize>,
        /// `r_{α,i}`: forward links of the last family into each family.
        last_forward: Vec<u64>,
        w: Vec<Permutation>,
        m: usize,
        extended_w: bool,
    },
    Unclassified,
}

impl GraphFamily {
    pub fn name(&self) -> &'static str {
        match self {
            GraphFamily::Finite { .. } => "Finite",
            GraphFamily::AlmostPathDirected { .. } => "AlmostPathDirected",
            GraphFamily::BackwardPathDirected { .. } => "BackwardPathDirected",
            GraphFamily::AlphaGrowing { .. } => "AlphaGrowing",
            GraphFamily::Unclassified => "Unclassified",
        }
    }

    pub fn w(&self) -> Option<&[Permutation]> {
        match self {
            GraphFamily::AlmostPathDirected { w, .. }
            | GraphFamily::BackwardPathDirected { w, .. }
            | GraphFamily::AlphaGrowing { w, .. } => Some(w),
            _ => None,
        }
    }
}

fn list(w: &[Permutation]) -> String {
    let items: Vec<String> = w.iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ext = |e: &bool| if *e { " (W extends past m)" } else { "" };
        match self {
            GraphFamily::Finite { matrix } => write!(f, "Finite, {} classes", matrix.order()),
            GraphFamily::AlmostPathDirected { chain, w, m, extended_w } => {
                write!(f, "AlmostPathDirected, V' = {}, W = {}, m = {m}{}", chain.render(0), list(w), ext(extended_w))
            }
            GraphFamily::BackwardPathDirected { chain, w, a_loops, m, extended_w } => write!(
                f,
                "BackwardPathDirected, V' = {}, W = {}, a = {a_loops}, m = {m}{}",
                chain.render(0),
                list(w),
                ext(extended_w)
            ),
            GraphFamily::AlphaGrowing { alpha, families, w, m, extended_w, .. } => {
                let fams: Vec<String> = families.iter().map(|t| t.render(0)).collect();
                write!(
                    f,
                    "AlphaGrowing, alpha = {alpha}, families = [{}], W = {}, m = {m}{}",
                    fams.join("; "),
                    list(w),
                    ext(extended_w)
                )
            }
            GraphFamily::Unclassified => write!(f, "Unclassified"),
        }
    }
}

fn links_of(rule: &GeneralRule) -> impl Iterator<Item = &FamilyLink> {
    rule.links.iter()
}

fn only_link(rule: &GeneralRule, target: usize) -> Option<&FamilyLink> {
    match rule.links.as_slice() {
        [l] if l.target == target => Some(l),
        _ => None,
    }
}

/// Matches the compressed rules against the known shapes, in the fixed order
/// Finite, AlmostPathDirected, BackwardPathDirected, AlphaGrowing.
pub fn classify_graph(cr: &CompressedRules) -> GraphFamily {
    if cr.families.is_empty() {
        return match transition_matrix(&cr.rules) {
            Ok(matrix) => GraphFamily::Finite { matrix },
            Err(_) => GraphFamily::Unclassified,
        };
    }
    let w: Vec<Permutation> = cr.w.iter().map(|&c| cr.rules.class(c).representative.clone()).collect();
    let (m, extended_w) = (cr.m, cr.extended_w);
    if let [fam] = cr.families.as_slice() {
        if let Some(l) = only_link(&fam.rule, 0) {
            if (l.range, l.minus, l.zero, l.plus) == (0, 0, 0, 1) {
                return GraphFamily::AlmostPathDirected { chain: fam.template.clone(), w, m, extended_w };
            }
            if l.range == 1 && l.minus == 0 && l.plus == 1 {
                return GraphFamily::BackwardPathDirected {
                    chain: fam.template.clone(),
                    w,
                    a_loops: l.zero,
                    m,
                    extended_w,
                };
            }
        }
    }
    match alpha_order(cr) {
        Some((order, routing)) => {
            let last = *order.last().expect("non-empty");
            let last_forward = order.iter().map(|&g| cr.families[last].rule.link_to(g).map_or(0, |l| l.plus)).collect();
            GraphFamily::AlphaGrowing {
                alpha: cr.families.iter().map(|f| f.paths.max(1)).sum(),
                families: order.iter().map(|&f| cr.families[f].template.clone()).collect(),
                routing,
                last_forward,
                w,
                m,
                extended_w,
            }
        }
        None => GraphFamily::Unclassified,
    }
}

fn is_first(rule: &GeneralRule, me: usize) -> bool {
    only_link(rule, me).is_some_and(|l| l.range == 1 && l.minus == 0 && l.plus == 0)
}

/// `s'` if `rule` has the middle shape with its range into an earlier family.
/// Single forward links into other earlier families are tolerated too.
fn middle_target(rule: &GeneralRule, me: usize, earlier: &[usize]) -> Option<usize> {
    let mut target = None;
    for l in links_of(rule) {
        if l.target == me {
            if l.range != 0 || l.minus != 0 || l.plus != 0 {
                return None;
            }
        } else if !earlier.contains(&l.target) || l.minus != 0 {
            return None;
        } else if l.range == 1 && target.is_none() {
            target = Some(l.target);
        } else if l.range != 0 || l.zero != 0 || l.plus > 1 {
            return None;
        }
    }
    target
}

fn last_target(rule: &GeneralRule, me: usize, earlier: &[usize]) -> Option<usize> {
    let mut target = None;
    for l in links_of(rule) {
        if l.minus != 0 || l.plus > 1 {
            return None;
        }
        if l.range == 1 {
            if l.target == me || target.is_some() || !earlier.contains(&l.target) {
                return None;
            }
            target = Some(l.target);
        } else if l.range != 0 || (l.zero != 0 && l.target != me) {
            return None;
        }
    }
    target
}

/// A schema order of the families and the routing `s'` of each.
fn alpha_order(cr: &CompressedRules) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = cr.families.len();
    let rules: Vec<&GeneralRule> = cr.families.iter().map(|f| &f.rule).collect();
    if n == 1 {
        return is_first(rules[0], 0).then(|| (vec![0], vec![0]));
    }
    let mut order = Vec::with_capacity(n);
    let mut routing = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn search(rules: &[&GeneralRule], order: &mut Vec<usize>, routing: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let n = rules.len();
        if order.len() == n {
            return true;
        }
        for f in 0..n {
            if used[f] {
                continue;
            }
            let pos = order.len();
            let route = if pos == 0 {
                is_first(rules[f], f).then_some(f)
            } else if pos + 1 == n {
                last_target(rules[f], f, order)
            } else {
                middle_target(rules[f], f, order)
            };
            let Some(route) = route else { continue };
            used[f] = true;
            order.push(f);
            routing.push(route);
            if search(rules, order, routing, used) {
                return true;
            }
            used[f] = false;
            order.pop();
            routing.pop();
        }
        false
    }
    search(&rules, &mut order, &mut routing, &mut used).then_some((order, routing))
}
