//! δ-stoppings: the prefix-free word sets `{𝐢 : Lip⁺(S_𝐢) < δ <= Lip⁺(S_𝐢₋)}`
//! used to build efficient covers, with audits for the covering and
//! cardinality bounds.

use std::collections::HashSet;

use crate::error::{IakError, Result};
use crate::geometry::AxisBox;
use crate::ifs::{CondensationSet, ComposedMap, IFSystem, Sampling, Word};

/// Membership tolerance for closed cylinder boxes.
pub const INCLUSION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeNode {
    /// Non-empty word with `Lip⁺ >= δ`; its children are explored.
    Internal,
    /// Word of the δ-stopping.
    Leaf,
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta <= 1.0 {
        Ok(())
    } else {
        Err(IakError::InvalidInput(format!("delta must lie in (0,1]: got {delta}")))
    }
}

/// Depth-first, lexicographic walk of the tree cut off at the δ-stopping.
/// The empty word is expanded without being visited.
pub fn walk_stopping_tree<F>(ifs: &IFSystem, delta: f64, mut visit: F) -> Result<()>
where
    F: FnMut(TreeNode, &ComposedMap),
{
    check_delta(delta)?;
    let budget = ifs.budget().0;
    let n = ifs.len() as u32;
    let mut created: usize = 0;
    let mut stack: Vec<ComposedMap> = Vec::new();
    let mut expand = |m: &ComposedMap, stack: &mut Vec<ComposedMap>| -> Result<()> {
        created += n as usize;
        if created > budget {
            return Err(IakError::BudgetExceeded { needed: created as u128, budget });
        }
        for l in (1..=n).rev() {
            stack.push(m.then(ifs, l));
        }
        Ok(())
    };
    expand(&ifs.identity(), &mut stack)?;
    while let Some(m) = stack.pop() {
        if m.lip_plus() >= delta {
            visit(TreeNode::Internal, &m);
            expand(&m, &mut stack)?;
        } else {
            visit(TreeNode::Leaf, &m);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoppingWord {
    pub word: Word,
    pub lip_plus: f64,
    pub lip_minus: f64,
}

/// The δ-stopping `𝓘(δ)` of a system.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaStopping {
    pub delta: f64,
    pub words: Vec<StoppingWord>,
    /// `L_min = min_i Lip⁻(S_i)`.
    pub l_min: f64,
    pub alphabet: usize,
    /// Constants are product bounds rather than exact values.
    pub surrogate: bool,
    first_level_lip_plus: Vec<f64>,
}

pub fn delta_stopping(ifs: &IFSystem, delta: f64) -> Result<DeltaStopping> {
    let mut words = Vec::new();
    let mut exact = true;
    walk_stopping_tree(ifs, delta, |node, m| {
        if node == TreeNode::Leaf {
            exact &= m.is_exact();
            words.push(StoppingWord { word: m.word.clone(), lip_plus: m.lip_plus(), lip_minus: m.lip_minus() });
        }
    })?;
    Ok(DeltaStopping {
        delta,
        words,
        l_min: ifs.l_min(),
        alphabet: ifs.len(),
        surrogate: !exact,
        first_level_lip_plus: ifs.maps().iter().map(|m| m.lip_plus()).collect(),
    })
}

/// `b_t = q/(1−q)` with `q = Σ_i Lip⁺(S_i)^t`, the geometric bound on
/// `Σ_{𝐢 ∈ 𝓘*} Lip⁺(S_𝐢)^t`. Requires `t > s₁`, i.e. `q < 1`.
pub fn b_t_constant(ifs: &IFSystem, t: f64) -> Result<f64> {
    let lips: Vec<f64> = ifs.maps().iter().map(|m| m.lip_plus()).collect();
    b_t_from_lips(&lips, t)
}

fn b_t_from_lips(lips: &[f64], t: f64) -> Result<f64> {
    let q: f64 = lips.iter().map(|l| l.powf(t)).sum();
    if q >= 1.0 {
        return Err(IakError::SeriesDiverges { t, level_sum: q });
    }
    Ok(q / (1.0 - q))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CardinalityReport {
    pub lhs: usize,
    pub rhs: f64,
    pub b_t: f64,
    pub holds: bool,
}

/// Checks `|𝓘(δ)| <= b_t · L_min^(−t) · δ^(−t)`.
pub fn check_cardinality_bound(stopping: &DeltaStopping, ifs: &IFSystem, t: f64) -> Result<CardinalityReport> {
    let b_t = b_t_constant(ifs, t)?;
    let rhs = b_t * stopping.l_min.powf(-t) * stopping.delta.powf(-t);
    let lhs = stopping.words.len();
    Ok(CardinalityReport { lhs, rhs, b_t, holds: (lhs as f64) <= rhs })
}

/// Structural audit of a stopping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoppingAudit {
    pub prefix_free: bool,
    pub complete: bool,
    /// `Lip⁺(S_𝐢) < δ <= Lip⁺(S_𝐢₋)` recomputed from scratch for every word.
    pub stopping_rule: bool,
    /// `δ·L_min <= Lip⁺(S_𝐢) < δ`.
    pub sandwich: bool,
    /// `Σ Lip⁺(S_𝐢)^t <= b_t` at the audit exponent, when one was given.
    pub weighted_sum: Option<bool>,
}

impl StoppingAudit {
    pub fn all_hold(&self) -> bool {
        self.prefix_free && self.complete && self.stopping_rule && self.sandwich && self.weighted_sum.unwrap_or(true)
    }
}

impl DeltaStopping {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn max_depth(&self) -> usize {
        self.words.iter().map(|w| w.word.len()).max().unwrap_or(0)
    }

    pub fn b_t(&self, t: f64) -> Result<f64> {
        b_t_from_lips(&self.first_level_lip_plus, t)
    }

    /// No word is a proper prefix of another: in sorted order a word can
    /// only be a prefix of its immediate successor.
    pub fn is_prefix_free(&self) -> bool {
        let mut sorted: Vec<&Word> = self.words.iter().map(|w| &w.word).collect();
        sorted.sort();
        sorted.windows(2).all(|p| !p[0].is_prefix_of(p[1]))
    }

    /// Every infinite sequence has a prefix in the set: each proper prefix
    /// of a word has all `N` children present as words or proper prefixes.
    pub fn is_complete(&self) -> bool {
        let leaves: HashSet<&Word> = self.words.iter().map(|w| &w.word).collect();
        let mut internal: HashSet<Word> = HashSet::new();
        for w in &self.words {
            for p in 0..w.word.len() {
                internal.insert(w.word.prefix(p));
            }
        }
        if internal.is_empty() {
            return false;
        }
        internal.iter().all(|p| {
            (1..=self.alphabet as u32).all(|l| {
                let c = p.child(l);
                leaves.contains(&c) || internal.contains(&c)
            })
        })
    }

    pub fn audit(&self, ifs: &IFSystem, t: Option<f64>) -> Result<StoppingAudit> {
        let mut stopping_rule = true;
        let mut sandwich = true;
        for w in &self.words {
            let m = crate::ifs::compose(ifs, &w.word)?;
            let parent = crate::ifs::compose(ifs, &w.word.parent().unwrap_or_default())?;
            stopping_rule &= m.lip_plus() < self.delta && self.delta <= parent.lip_plus() && !w.word.is_empty();
            sandwich &= self.delta * self.l_min <= m.lip_plus() && m.lip_plus() < self.delta;
        }
        let weighted_sum = match t {
            Some(t) => {
                let b_t = self.b_t(t)?;
                let sum: f64 = crate::linalg::compensated_sum(self.words.iter().map(|w| w.lip_plus.powf(t)));
                Some(sum <= b_t)
            }
            None => None,
        };
        Ok(StoppingAudit {
            prefix_free: self.is_prefix_free(),
            complete: self.is_complete(),
            stopping_rule,
            sandwich,
            weighted_sum,
        })
    }
}

/// Checks `⋃_{Lip⁺(S_𝐢)<δ} S_𝐢(C) ⊆ ⋃_{𝐢 ∈ 𝓘(δ)} S_𝐢(X)` on samples.
///
/// Sampled words are the stopping words and their descendants up to two
/// letters deeper; membership in a cylinder is decided by pulling the point
/// back through `S_𝐮⁻¹` and testing it against X with [`INCLUSION_TOL`].
pub fn check_inclusion(
    ifs: &IFSystem,
    c: &CondensationSet,
    x: &AxisBox,
    delta: f64,
    sample_count: usize,
) -> Result<bool> {
    if !ifs.has_point_action() {
        return Err(IakError::NoPointAction);
    }
    let mut cylinders = Vec::new();
    walk_stopping_tree(ifs, delta, |node, m| {
        if node == TreeNode::Leaf {
            cylinders.push(m.clone());
        }
    })?;
    let inverses = cylinders
        .iter()
        .map(|m| m.action().unwrap().inverse().ok_or_else(|| IakError::Invariant("singular composite".into())))
        .collect::<Result<Vec<_>>>()?;
    let samples = c.sample(sample_count.max(1), Sampling::Grid, 0);
    let in_some_cylinder = |p: &[f64]| inverses.iter().any(|inv| x.contains(&inv.apply(p), INCLUSION_TOL));

    for m in &cylinders {
        let mut frontier = vec![m.clone()];
        for _ in 0..3 {
            let mut next = Vec::new();
            for w in &frontier {
                debug_assert!(w.lip_plus() < delta);
                let a = w.action().unwrap();
                if !samples.iter().all(|p| in_some_cylinder(&a.apply(p))) {
                    return Ok(false);
                }
                next.extend((1..=ifs.len() as u32).map(|l| w.then(ifs, l)));
            }
            frontier = next;
        }
    }
    Ok(true)
}
