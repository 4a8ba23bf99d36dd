//! Generating functions from compressed rule sets.

mod classify;
mod dp;
mod engine;

use subregular_symbolic::{
    algebraic_fit_deg2, pade_reconstruct, AlgebraicRelation, PowerSeries, QuadExt, RationalFunction,
    RESERVE_COEFFICIENTS,
};

pub use classify::{classify_graph, GraphFamily};
pub use dp::{series_dp, solve_finite};
pub use engine::{kernel_root, solve_families, FamilySolution};

use crate::error::{Error, Result};
use crate::gentree::Explorer;
use crate::induction::{induce_with, verify_general_rules, CompressedRules};
use crate::perm::{count_avoiders_with_budget, PatternSet, DEFAULT_NODE_BUDGET};

#[derive(Clone, Debug)]
pub struct SolveConfig {
    /// First exploration depth; defaults to `2t + 4`.
    pub depth: Option<usize>,
    /// Deepest exploration before giving up; defaults to `2t + 20`.
    pub max_depth: Option<usize>,
    pub series_order: usize,
    /// Oracle comparison range; defaults to 11 when some pattern has length
    /// 3 and 10 otherwise.
    pub n_verify: Option<usize>,
    pub node_budget: u64,
    /// Fall back to series fitting for unclassified shapes.
    pub allow_conjecture: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            depth: None,
            max_depth: None,
            series_order: subregular_symbolic::DEFAULT_SERIES_ORDER,
            n_verify: None,
            node_budget: DEFAULT_NODE_BUDGET,
            allow_conjecture: false,
        }
    }
}

impl SolveConfig {
    pub fn n_verify_for(&self, b: &PatternSet) -> usize {
        self.n_verify.unwrap_or(if b.patterns().iter().any(|p| p.len() == 3) { 11 } else { 10 })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gf {
    Rational(RationalFunction),
    QuadExt(QuadExt),
    Algebraic(AlgebraicRelation),
    SeriesOnly,
}

impl Gf {
    fn from_quad(q: QuadExt) -> Self {
        match q.as_rational() {
            Some(r) => Gf::Rational(r.clone()),
            None => Gf::QuadExt(q),
        }
    }

    pub fn series(&self, order: usize) -> Option<PowerSeries> {
        match self {
            Gf::Rational(r) => r.series_expand(order).ok(),
            Gf::QuadExt(q) => q.series_expand(order).ok(),
            Gf::Algebraic(_) | Gf::SeriesOnly => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Gf::Rational(r) => r.to_string(),
            Gf::QuadExt(q) => q.describe(),
            Gf::Algebraic(rel) => format!("({}) + ({})*G + ({})*G^2 = 0", show(&rel.p0), show(&rel.p1), show(&rel.p2)),
            Gf::SeriesOnly => "series only".into(),
        }
    }
}

fn show(p: &subregular_symbolic::Poly) -> String {
    RationalFunction::from_poly(p.clone()).to_string()
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub patterns: PatternSet,
    pub classification: GraphFamily,
    pub gf: Gf,
    pub series: PowerSeries,
    pub verified_against_oracle_to: usize,
    /// Largest parent length at which every general rule was checked by
    /// direct expansion (the explored depth for finite rule sets).
    pub certificate: usize,
    pub conjectural: bool,
    pub class_gfs: Vec<(String, Gf)>,
    pub rules: CompressedRules,
}

/// Explores deeper until the rule set closes or compresses into verified
/// general rules.
pub fn compress(b: &PatternSet, config: &SolveConfig) -> Result<CompressedRules> {
    compress_with(&mut Explorer::with_budget(b.clone(), config.node_budget), config)
}

fn compress_with(explorer: &mut Explorer, config: &SolveConfig) -> Result<CompressedRules> {
    let t = explorer.patterns().t();
    let mut depth = config.depth.unwrap_or(2 * t + 4);
    let cap = config.max_depth.unwrap_or(2 * t + 20).max(depth);
    loop {
        let rs = explorer.explore(depth)?;
        if rs.is_closed() {
            return induce_with(explorer, &rs);
        }
        match induce_with(explorer, &rs) {
            Ok(cr) => match verify_general_rules(&cr, explorer, 0) {
                Ok(()) => return Ok(cr),
                Err(Error::RuleMismatch(_)) => {}
                Err(e) => return Err(e),
            },
            Err(Error::NoFamilyFound(_)) => {}
            Err(e) => return Err(e),
        }
        if depth >= cap {
            return Err(Error::DepthExhausted { max_depth: cap });
        }
        depth = (depth + 2).min(cap);
    }
}

fn certificate(cr: &CompressedRules) -> usize {
    if cr.families.is_empty() {
        cr.rules.depth_explored
    } else {
        cr.m + cr.t() + 2
    }
}

/// The solver for the rule set's classification.
pub fn solve_rules(cr: &CompressedRules, classification: &GraphFamily) -> Result<(Gf, Vec<(String, Gf)>)> {
    match classification {
        GraphFamily::Finite { matrix } => {
            let g = solve_finite(matrix)?;
            Ok((Gf::Rational(g), Vec::new()))
        }
        GraphFamily::Unclassified => Err(Error::Unclassified("rule set matches no known family shape".into())),
        _ => {
            let sol = solve_families(cr)?;
            let class_gfs = sol.class_gfs.into_iter().map(|(k, v)| (k, Gf::from_quad(v))).collect();
            Ok((Gf::from_quad(sol.g), class_gfs))
        }
    }
}

fn require(cr: &CompressedRules, fam: &GraphFamily, want: &str) -> Result<QuadExt> {
    if fam.name() != want {
        return Err(Error::Unclassified(format!("expected {want}, rule set is {}", fam.name())));
    }
    Ok(solve_families(cr)?.g)
}

/// `F_1` for an almost path-directed rule set.
pub fn solve_almost_path(fam: &GraphFamily, cr: &CompressedRules) -> Result<RationalFunction> {
    let g = require(cr, fam, "AlmostPathDirected")?;
    g.as_rational().cloned().ok_or(Error::Unclassified("almost path-directed result is not rational".into()))
}

/// `F_1` for a backward path-directed rule set, in `Q(x)(t₀)`.
pub fn solve_backward_path(fam: &GraphFamily, cr: &CompressedRules) -> Result<QuadExt> {
    require(cr, fam, "BackwardPathDirected")
}

/// `F_1` for a rule set with α-growing paths.
pub fn solve_alpha_growing(fam: &GraphFamily, cr: &CompressedRules) -> Result<RationalFunction> {
    let g = require(cr, fam, "AlphaGrowing")?;
    g.as_rational().cloned().ok_or(Error::Unclassified("α-growing result is not rational".into()))
}

/// Explore, compress, classify, solve and cross-check against series DP and
/// brute-force enumeration.
pub fn solve(b: &PatternSet, config: &SolveConfig) -> Result<SolveReport> {
    let mut explorer = Explorer::with_budget(b.clone(), config.node_budget);
    let cr = compress_with(&mut explorer, config)?;
    let classification = classify_graph(&cr);
    let n_verify = config.n_verify_for(b);
    let order = config.series_order.max(n_verify);
    let dp = series_dp(&cr, order);

    let (gf, class_gfs, conjectural) = match classification {
        GraphFamily::Unclassified => {
            if !config.allow_conjecture {
                return Err(Error::Unclassified(format!("{b}: rule set matches no known family shape")));
            }
            (fit_series(&dp), Vec::new(), true)
        }
        _ => {
            let (gf, class_gfs) = solve_rules(&cr, &classification)?;
            (gf, class_gfs, false)
        }
    };
    if let Some(s) = gf.series(order) {
        if s != dp {
            return Err(Error::VerificationMismatch(format!(
                "{b}: expansion of {} disagrees with the rule-set counts",
                gf.describe()
            )));
        }
    }
    let oracle = count_avoiders_with_budget(b, n_verify, config.node_budget)?;
    for (n, &count) in oracle.iter().enumerate() {
        if dp.coeff(n + 1) != subregular_symbolic::Rat::from_integer(count.into()) {
            return Err(Error::VerificationMismatch(format!(
                "{b}: coefficient of x^{} is {} but there are {count} avoiders",
                n + 1,
                dp.coeff(n + 1)
            )));
        }
    }
    Ok(SolveReport {
        patterns: b.clone(),
        classification,
        gf,
        series: dp,
        verified_against_oracle_to: n_verify,
        certificate: certificate(&cr),
        conjectural,
        class_gfs,
        rules: cr,
    })
}

/// Padé, then a quadratic relation, from the exact rule-set series.
fn fit_series(series: &PowerSeries) -> Gf {
    let usable = (series.order() + 1).saturating_sub(RESERVE_COEFFICIENTS);
    if let Some(r) = pade_reconstruct(series, usable.saturating_sub(1) / 2) {
        return Gf::Rational(r);
    }
    if let Some(rel) = algebraic_fit_deg2(series, (usable / 3).saturating_sub(1)) {
        return match rel.as_rational() {
            Some(r) => Gf::Rational(r),
            None => Gf::Algebraic(rel),
        };
    }
    Gf::SeriesOnly
}
