//! Contractions, words, compositions and condensation sets.
//!
//! An [`IFSystem`] is an ordered family of [`ContractionMap`]s sharing one
//! variant family. Words are indexed from 1, so the word `(1, 2)` denotes the
//! composite `S_1 ∘ S_2`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{IakError, Result};
use crate::geometry::{AxisBox, PointCloud};
use crate::linalg::{extreme_singular_values, orthogonality_defect, Matrix, Vector};
use crate::stopping::{walk_stopping_tree, TreeNode};

/// Tolerance on `‖QᵀQ − I‖_max` for similarity isometries.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;

/// Maximum number of composites any enumeration may build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordBudget(pub usize);

impl Default for WordBudget {
    fn default() -> Self {
        WordBudget(1_000_000)
    }
}

impl WordBudget {
    /// Fails unless `n^k` composites fit in the budget.
    pub fn check_level(self, n: usize, k: usize) -> Result<usize> {
        let needed = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if needed > self.0 as u128 {
            Err(IakError::BudgetExceeded { needed, budget: self.0 })
        } else {
            Ok(needed as usize)
        }
    }
}

/// A finite word over the alphabet `{1..N}`. The empty word is ω.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<u32>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `𝐢₋`: the word with its last letter removed.
    pub fn parent(&self) -> Option<Word> {
        if self.0.is_empty() {
            None
        } else {
            Some(Word(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn prefix(&self, p: usize) -> Word {
        Word(self.0[..p.min(self.0.len())].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    pub fn child(&self, letter: u32) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(letter);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn validate(&self, alphabet: usize) -> Result<()> {
        match self.0.iter().find(|&&l| l == 0 || l as usize > alphabet) {
            Some(&l) => Err(IakError::InvalidWord { letter: l as usize, alphabet }),
            None => Ok(()),
        }
    }

    /// All words of length `k` in lexicographic order.
    pub fn all_of_length(alphabet: usize, k: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..k {
            out = out
                .iter()
                .flat_map(|w| (1..=alphabet as u32).map(move |l| w.child(l)))
                .collect();
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ω");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Point action `x ↦ Ax + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineAction {
    pub linear: Matrix,
    pub translation: Vector,
}

impl AffineAction {
    pub fn identity(dim: usize) -> Self {
        AffineAction { linear: Matrix::identity(dim, dim), translation: Vector::zeros(dim) }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = self.translation[i];
            for (j, x) in p.iter().enumerate() {
                acc += self.linear[(i, j)] * x;
            }
            *o = acc;
        }
        out
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineAction) -> AffineAction {
        AffineAction {
            linear: &self.linear * &inner.linear,
            translation: &self.linear * &inner.translation + &self.translation,
        }
    }

    pub fn inverse(&self) -> Option<AffineAction> {
        let inv = self.linear.clone().try_inverse()?;
        let translation = -(&inv * &self.translation);
        Some(AffineAction { linear: inv, translation })
    }

    /// Solution of `x = Ax + b`.
    pub fn fixed_point(&self) -> Option<Vec<f64>> {
        let n = self.dim();
        let lhs = Matrix::identity(n, n) - &self.linear;
        lhs.lu().solve(&self.translation).map(|v| v.iter().cloned().collect())
    }
}

/// Variant data of a single contraction.
#[derive(Debug, Clone, PartialEq)]
pub enum MapKind {
    Similarity { ratio: f64, isometry: Matrix, translation: Vector },
    Affine { linear: Matrix, translation: Vector },
    AbstractLipschitz { lip_plus: f64, lip_minus: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapFamily {
    Similarity,
    Affine,
    AbstractLipschitz,
}

impl fmt::Display for MapFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapFamily::Similarity => "similarity",
            MapFamily::Affine => "affine",
            MapFamily::AbstractLipschitz => "abstract",
        })
    }
}

/// One bi-Lipschitz contraction with its Lipschitz constants.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionMap {
    kind: MapKind,
    lip_plus: f64,
    lip_minus: f64,
}

impl ContractionMap {
    pub fn similarity(ratio: f64, isometry: Matrix, translation: Vector) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(IakError::Invariant(format!("ratio in (0,1): got {ratio}")));
        }
        if !isometry.is_square() || isometry.nrows() != translation.len() {
            return Err(IakError::Invariant("isometry must be n×n with n = translation length".into()));
        }
        let defect = orthogonality_defect(&isometry);
        if defect > ORTHOGONALITY_TOL {
            return Err(IakError::Invariant(format!(
                "isometry orthogonal within 1e-12: defect {defect:e}"
            )));
        }
        Ok(ContractionMap {
            kind: MapKind::Similarity { ratio, isometry, translation },
            lip_plus: ratio,
            lip_minus: ratio,
        })
    }

    /// Similarity with identity isometry.
    pub fn scaling(ratio: f64, translation: Vec<f64>) -> Result<Self> {
        let n = translation.len();
        Self::similarity(ratio, Matrix::identity(n, n), Vector::from_vec(translation))
    }

    pub fn affine(linear: Matrix, translation: Vector) -> Result<Self> {
        if !linear.is_square() || linear.nrows() != translation.len() {
            return Err(IakError::Invariant("linear part must be n×n with n = translation length".into()));
        }
        let (hi, lo) = extreme_singular_values(&linear);
        if !(hi > 0.0 && hi < 1.0) {
            return Err(IakError::Invariant(format!(
                "largest singular value in (0,1): got {hi}"
            )));
        }
        if !(lo > 0.0) {
            return Err(IakError::Invariant("smallest singular value > 0 (bi-Lipschitz)".into()));
        }
        Ok(ContractionMap { kind: MapKind::Affine { linear, translation }, lip_plus: hi, lip_minus: lo })
    }

    pub fn diagonal(diag: &[f64], translation: Vec<f64>) -> Result<Self> {
        Self::affine(
            Matrix::from_diagonal(&Vector::from_column_slice(diag)),
            Vector::from_vec(translation),
        )
    }

    pub fn abstract_lipschitz(lip_plus: f64, lip_minus: f64) -> Result<Self> {
        if !(lip_minus > 0.0 && lip_minus <= lip_plus && lip_plus < 1.0) {
            return Err(IakError::Invariant(format!(
                "0 < lip_minus <= lip_plus < 1: got lip_minus {lip_minus}, lip_plus {lip_plus}"
            )));
        }
        Ok(ContractionMap { kind: MapKind::AbstractLipschitz { lip_plus, lip_minus }, lip_plus, lip_minus })
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn family(&self) -> MapFamily {
        match self.kind {
            MapKind::Similarity { .. } => MapFamily::Similarity,
            MapKind::Affine { .. } => MapFamily::Affine,
            MapKind::AbstractLipschitz { .. } => MapFamily::AbstractLipschitz,
        }
    }

    pub fn lip_plus(&self) -> f64 {
        self.lip_plus
    }

    pub fn lip_minus(&self) -> f64 {
        self.lip_minus
    }

    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            MapKind::Similarity { translation, .. } | MapKind::Affine { translation, .. } => {
                Some(translation.len())
            }
            MapKind::AbstractLipschitz { .. } => None,
        }
    }

    pub fn action(&self) -> Option<AffineAction> {
        match &self.kind {
            MapKind::Similarity { ratio, isometry, translation } => Some(AffineAction {
                linear: isometry * *ratio,
                translation: translation.clone(),
            }),
            MapKind::Affine { linear, translation } => {
                Some(AffineAction { linear: linear.clone(), translation: translation.clone() })
            }
            MapKind::AbstractLipschitz { .. } => None,
        }
    }

    pub fn similarity_ratio(&self) -> Option<f64> {
        match self.kind {
            MapKind::Similarity { ratio, .. } => Some(ratio),
            _ => None,
        }
    }
}

/// User-asserted separation and distortion properties. Never verified.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SeparationFlags {
    pub sosc: bool,
    pub cosc: bool,
    pub bounded_distortion: Option<f64>,
}

/// An iterated function system.
#[derive(Debug, Clone, PartialEq)]
pub struct IFSystem {
    maps: Vec<ContractionMap>,
    ambient_dim: usize,
    flags: SeparationFlags,
    budget: WordBudget,
}

impl IFSystem {
    pub fn new(maps: Vec<ContractionMap>, ambient_dim: usize, flags: SeparationFlags) -> Result<Self> {
        if maps.is_empty() {
            return Err(IakError::Invariant("N >= 1 maps".into()));
        }
        if ambient_dim == 0 {
            return Err(IakError::Invariant("ambient_dim positive".into()));
        }
        let family = maps[0].family();
        if maps.iter().any(|m| m.family() != family) {
            return Err(IakError::Invariant("all maps share one variant family".into()));
        }
        if maps.iter().filter_map(|m| m.dim()).any(|d| d != ambient_dim) {
            return Err(IakError::Invariant("all maps share ambient_dim".into()));
        }
        if let Some(l) = flags.bounded_distortion {
            if !(l > 1.0) {
                return Err(IakError::Invariant(format!("bounded distortion L > 1: got {l}")));
            }
        }
        Ok(IFSystem { maps, ambient_dim, flags, budget: WordBudget::default() })
    }

    pub fn with_budget(mut self, budget: WordBudget) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_flags(mut self, flags: SeparationFlags) -> Self {
        self.flags = flags;
        self
    }

    pub fn maps(&self) -> &[ContractionMap] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn flags(&self) -> &SeparationFlags {
        &self.flags
    }

    pub fn budget(&self) -> WordBudget {
        self.budget
    }

    pub fn family(&self) -> MapFamily {
        self.maps[0].family()
    }

    pub fn has_point_action(&self) -> bool {
        self.family() != MapFamily::AbstractLipschitz
    }

    /// `L_min`: smallest first-level lower Lipschitz constant.
    pub fn l_min(&self) -> f64 {
        self.maps.iter().map(|m| m.lip_minus).fold(f64::INFINITY, f64::min)
    }

    pub fn similarity_ratios(&self) -> Option<Vec<f64>> {
        self.maps.iter().map(|m| m.similarity_ratio()).collect()
    }

    pub fn identity(&self) -> ComposedMap {
        ComposedMap {
            word: Word::empty(),
            action: self.has_point_action().then(|| AffineAction::identity(self.ambient_dim)),
            lip_plus: 1.0,
            lip_minus: 1.0,
            exact: self.family() != MapFamily::AbstractLipschitz,
        }
    }
}

/// `S_𝐢` together with its Lipschitz constants.
///
/// For abstract systems the constants are product bounds, and `exact` is
/// false.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposedMap {
    pub word: Word,
    action: Option<AffineAction>,
    lip_plus: f64,
    lip_minus: f64,
    exact: bool,
}

impl ComposedMap {
    pub fn lip_plus(&self) -> f64 {
        self.lip_plus
    }

    pub fn lip_minus(&self) -> f64 {
        self.lip_minus
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn action(&self) -> Option<&AffineAction> {
        self.action.as_ref()
    }

    /// `S_𝐢 ∘ S_j` for the word `𝐢j`.
    pub fn then(&self, ifs: &IFSystem, letter: u32) -> ComposedMap {
        let map = &ifs.maps[letter as usize - 1];
        let word = self.word.child(letter);
        match &map.kind {
            MapKind::Similarity { .. } => {
                let action = self.action.as_ref().map(|a| a.compose(&map.action().unwrap()));
                let r = self.lip_plus * map.lip_plus;
                ComposedMap { word, action, lip_plus: r, lip_minus: r, exact: true }
            }
            MapKind::Affine { .. } => {
                let action = self.action.as_ref().unwrap().compose(&map.action().unwrap());
                let (hi, lo) = extreme_singular_values(&action.linear);
                ComposedMap { word, action: Some(action), lip_plus: hi, lip_minus: lo, exact: true }
            }
            MapKind::AbstractLipschitz { .. } => ComposedMap {
                word,
                action: None,
                lip_plus: self.lip_plus * map.lip_plus,
                lip_minus: self.lip_minus * map.lip_minus,
                exact: false,
            },
        }
    }
}

/// `S_𝐢 = S_{i_1} ∘ ⋯ ∘ S_{i_k}`.
pub fn compose(ifs: &IFSystem, w: &Word) -> Result<ComposedMap> {
    w.validate(ifs.len())?;
    Ok(w.letters().iter().fold(ifs.identity(), |acc, &l| acc.then(ifs, l)))
}

pub fn apply(m: &ComposedMap, p: &[f64]) -> Result<Vec<f64>> {
    let action = m.action.as_ref().ok_or(IakError::NoPointAction)?;
    if p.len() != action.dim() {
        return Err(IakError::InvalidInput(format!(
            "point has dimension {}, map acts on R^{}",
            p.len(),
            action.dim()
        )));
    }
    Ok(action.apply(p))
}

/// The system `{S_𝐢 : 𝐢 ∈ 𝓘^k}` in lexicographic word order.
pub fn iterate_system(ifs: &IFSystem, k: usize) -> Result<IFSystem> {
    if k == 0 {
        return Err(IakError::InvalidInput("k must be positive".into()));
    }
    ifs.budget.check_level(ifs.len(), k)?;
    let mut level = vec![ifs.identity()];
    for _ in 0..k {
        level = level
            .par_iter()
            .flat_map_iter(|m| (1..=ifs.len() as u32).map(move |l| m.then(ifs, l)))
            .collect();
    }
    let maps = level
        .into_iter()
        .map(|m| match ifs.family() {
            MapFamily::Similarity => {
                let a = m.action.unwrap();
                let isometry = a.linear / m.lip_plus;
                Ok(ContractionMap {
                    kind: MapKind::Similarity { ratio: m.lip_plus, isometry, translation: a.translation },
                    lip_plus: m.lip_plus,
                    lip_minus: m.lip_minus,
                })
            }
            MapFamily::Affine => {
                let a = m.action.unwrap();
                Ok(ContractionMap {
                    kind: MapKind::Affine { linear: a.linear, translation: a.translation },
                    lip_plus: m.lip_plus,
                    lip_minus: m.lip_minus,
                })
            }
            MapFamily::AbstractLipschitz => ContractionMap::abstract_lipschitz(m.lip_plus, m.lip_minus),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IFSystem { maps, ambient_dim: ifs.ambient_dim, flags: ifs.flags.clone(), budget: ifs.budget })
}

/// Lipschitz data for every word of one length, lexicographic order.
///
/// Affine levels keep the product matrices so longer levels can be built by
/// multiplying stored products instead of recomposing from letters.
#[derive(Debug, Clone)]
pub struct Level {
    pub k: usize,
    family: MapFamily,
    linear: Vec<Matrix>,
    lips: Vec<(f64, f64)>,
}

impl Level {
    pub fn first(ifs: &IFSystem) -> Level {
        let linear = match ifs.family() {
            MapFamily::Affine => ifs.maps.iter().map(|m| m.action().unwrap().linear).collect(),
            _ => Vec::new(),
        };
        Level {
            k: 1,
            family: ifs.family(),
            linear,
            lips: ifs.maps.iter().map(|m| (m.lip_plus, m.lip_minus)).collect(),
        }
    }

    /// Level for words `uv`, `u` from `self`, `v` from `other`.
    pub fn concat(&self, other: &Level) -> Level {
        let k = self.k + other.k;
        match self.family {
            MapFamily::Affine => {
                let linear: Vec<Matrix> = self
                    .linear
                    .par_iter()
                    .flat_map_iter(|u| other.linear.iter().map(move |v| u * v))
                    .collect();
                let lips = linear.par_iter().map(extreme_singular_values).collect();
                Level { k, family: self.family, linear, lips }
            }
            _ => {
                let lips = self
                    .lips
                    .par_iter()
                    .flat_map_iter(|&(up, um)| other.lips.iter().map(move |&(vp, vm)| (up * vp, um * vm)))
                    .collect();
                Level { k, family: self.family, linear: Vec::new(), lips }
            }
        }
    }

    pub fn build(ifs: &IFSystem, k: usize, budget: WordBudget) -> Result<Level> {
        if k == 0 {
            return Err(IakError::InvalidInput("k must be positive".into()));
        }
        budget.check_level(ifs.len(), k)?;
        let first = Level::first(ifs);
        Ok(Self::build_from(&first, k))
    }

    fn build_from(first: &Level, k: usize) -> Level {
        if k == 1 {
            first.clone()
        } else if k.is_multiple_of(2) {
            let half = Self::build_from(first, k / 2);
            half.concat(&half)
        } else {
            Self::build_from(first, k - 1).concat(first)
        }
    }

    pub fn len(&self) -> usize {
        self.lips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lips.is_empty()
    }

    pub fn lips(&self) -> &[(f64, f64)] {
        &self.lips
    }

    pub fn lip_plus(&self) -> impl Iterator<Item = f64> + '_ {
        self.lips.iter().map(|p| p.0)
    }
}

/// Hausdorff measure of C at a stated dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HausdorffValue {
    pub d: f64,
    pub measure: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CondensationShape {
    FinitePoints(Vec<Vec<f64>>),
    Segment([Vec<f64>; 2]),
    AxisBox(AxisBox),
    Disk { center: Vec<f64>, radius: f64 },
    BitmapCloud(Vec<Vec<f64>>),
}

/// How condensation sets are sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    /// Regular lattice including the boundary.
    #[default]
    Grid,
    /// One uniform point per lattice cell, reproducible from the seed.
    Jittered(u64),
}

/// The compact set adjoined at every level of the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensationSet {
    shape: CondensationShape,
    dim: usize,
    box_dim: f64,
    hausdorff: Option<HausdorffValue>,
}

fn unit_ball_volume(n: usize) -> f64 {
    // V_n = π^{n/2} / Γ(n/2 + 1), via V_n = 2π/n · V_{n-2}
    let (mut v, start) = if n.is_multiple_of(2) { (1.0, 2) } else { (2.0, 3) };
    let mut m = start;
    while m <= n {
        v *= 2.0 * std::f64::consts::PI / m as f64;
        m += 2;
    }
    v
}

fn check_points(points: &[Vec<f64>]) -> Result<usize> {
    let first = points.first().ok_or_else(|| IakError::EmptyInput("condensation set has no points".into()))?;
    let dim = first.len();
    if dim == 0 || points.iter().any(|p| p.len() != dim || p.iter().any(|x| !x.is_finite())) {
        return Err(IakError::Invariant("condensation points share a positive dimension and are finite".into()));
    }
    Ok(dim)
}

impl CondensationSet {
    pub fn points(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = check_points(&points)?;
        let mut distinct = points.clone();
        distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
        distinct.dedup();
        let count = distinct.len() as f64;
        Ok(CondensationSet {
            shape: CondensationShape::FinitePoints(points),
            dim,
            box_dim: 0.0,
            hausdorff: Some(HausdorffValue { d: 0.0, measure: count }),
        })
    }

    pub fn segment(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let dim = check_points(&[a.clone(), b.clone()])?;
        let length = crate::linalg::euclidean_distance(&a, &b);
        if length <= 0.0 {
            return Err(IakError::Invariant("segment endpoints must differ".into()));
        }
        Ok(CondensationSet {
            shape: CondensationShape::Segment([a, b]),
            dim,
            box_dim: 1.0,
            hausdorff: Some(HausdorffValue { d: 1.0, measure: length }),
        })
    }

    pub fn axis_box(corner: Vec<f64>, widths: Vec<f64>) -> Result<Self> {
        if corner.len() != widths.len() || widths.iter().any(|w| *w < 0.0) {
            return Err(IakError::Invariant("box widths non-negative, one per axis".into()));
        }
        let max = corner.iter().zip(&widths).map(|(c, w)| c + w).collect();
        let b = AxisBox::new(corner, max)?;
        let dim = b.dim();
        let positive = widths.iter().filter(|w| **w > 0.0).count();
        let hausdorff = (positive == dim).then(|| HausdorffValue { d: dim as f64, measure: b.volume() });
        Ok(CondensationSet { shape: CondensationShape::AxisBox(b), dim, box_dim: positive as f64, hausdorff })
    }

    pub fn disk(center: Vec<f64>, radius: f64) -> Result<Self> {
        let dim = check_points(std::slice::from_ref(&center))?;
        if !(radius > 0.0) {
            return Err(IakError::Invariant("disk radius > 0".into()));
        }
        let volume = unit_ball_volume(dim) * radius.powi(dim as i32);
        Ok(CondensationSet {
            shape: CondensationShape::Disk { center, radius },
            dim,
            box_dim: dim as f64,
            hausdorff: Some(HausdorffValue { d: dim as f64, measure: volume }),
        })
    }

    pub fn cloud(points: Vec<Vec<f64>>, declared_box_dim: f64) -> Result<Self> {
        let dim = check_points(&points)?;
        if !(declared_box_dim >= 0.0 && declared_box_dim <= dim as f64) {
            return Err(IakError::Invariant("declared box dimension in [0, n]".into()));
        }
        Ok(CondensationSet {
            shape: CondensationShape::BitmapCloud(points),
            dim,
            box_dim: declared_box_dim,
            hausdorff: None,
        })
    }

    /// Overrides the Hausdorff value. Defaults are Lebesgue-normalised:
    /// counting measure for points, length for segments, volume for boxes
    /// and disks.
    pub fn with_hausdorff(mut self, value: Option<HausdorffValue>) -> Result<Self> {
        if let Some(v) = value {
            if !(v.d >= 0.0 && v.measure.is_finite() && v.measure > 0.0) {
                return Err(IakError::Invariant("Hausdorff value needs d >= 0 and 0 < H_d < ∞".into()));
            }
        }
        self.hausdorff = value;
        Ok(self)
    }

    pub fn shape(&self) -> &CondensationShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn box_dim(&self) -> f64 {
        self.box_dim
    }

    pub fn hausdorff(&self) -> Option<HausdorffValue> {
        self.hausdorff
    }

    pub fn is_full_dimensional(&self) -> bool {
        match &self.shape {
            CondensationShape::AxisBox(_) | CondensationShape::Disk { .. } => self.box_dim == self.dim as f64,
            _ => false,
        }
    }

    pub fn bounding_box(&self) -> AxisBox {
        match &self.shape {
            CondensationShape::FinitePoints(p) | CondensationShape::BitmapCloud(p) => {
                AxisBox::bounding(p).expect("non-empty by construction")
            }
            CondensationShape::Segment(ends) => AxisBox::bounding(ends).unwrap(),
            CondensationShape::AxisBox(b) => b.clone(),
            CondensationShape::Disk { center, radius } => AxisBox {
                min: center.iter().map(|c| c - radius).collect(),
                max: center.iter().map(|c| c + radius).collect(),
            },
        }
    }

    /// Membership test for the analytic variants; point-like variants use
    /// distance `<= tol` to a listed point.
    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        use crate::linalg::euclidean_distance as dist;
        match &self.shape {
            CondensationShape::FinitePoints(pts) | CondensationShape::BitmapCloud(pts) => {
                pts.iter().any(|q| dist(p, q) <= tol)
            }
            CondensationShape::Segment([a, b]) => {
                let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
                let ap: Vec<f64> = a.iter().zip(p).map(|(x, y)| y - x).collect();
                let len2: f64 = ab.iter().map(|x| x * x).sum();
                let t = (ab.iter().zip(&ap).map(|(x, y)| x * y).sum::<f64>() / len2).clamp(0.0, 1.0);
                let proj: Vec<f64> = a.iter().zip(&ab).map(|(x, d)| x + t * d).collect();
                dist(p, &proj) <= tol
            }
            CondensationShape::AxisBox(b) => b.contains(p, tol),
            CondensationShape::Disk { center, radius } => dist(p, center) <= radius + tol,
        }
    }

    /// Samples C at `per_axis` points per unit extent of the set. `stream`
    /// selects an independent random stream for jittered sampling.
    pub fn sample(&self, per_axis: usize, sampling: Sampling, stream: u64) -> PointCloud {
        let m = per_axis.max(1);
        let mut rng = match sampling {
            Sampling::Jittered(seed) => {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                r.set_stream(stream);
                Some(r)
            }
            Sampling::Grid => None,
        };
        let mut cloud = PointCloud::new(self.dim);
        match &self.shape {
            CondensationShape::FinitePoints(pts) | CondensationShape::BitmapCloud(pts) => {
                for p in pts {
                    cloud.push(p);
                }
            }
            CondensationShape::Segment([a, b]) => {
                let ts: Vec<f64> = match rng.as_mut() {
                    None => (0..=m).map(|i| i as f64 / m as f64).collect(),
                    Some(r) => (0..m).map(|i| (i as f64 + r.random::<f64>()) / m as f64).collect(),
                };
                for t in ts {
                    let p: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect();
                    cloud.push(&p);
                }
            }
            CondensationShape::AxisBox(bx) => {
                lattice(bx, m, rng.as_mut(), |p| cloud.push(p));
            }
            CondensationShape::Disk { center, radius } => {
                let bx = self.bounding_box();
                lattice(&bx, m, rng.as_mut(), |p| {
                    if crate::linalg::euclidean_distance(p, center) <= *radius {
                        cloud.push(p);
                    }
                });
                if cloud.is_empty() {
                    cloud.push(center);
                }
            }
        }
        cloud
    }
}

/// Visits a lattice over `bx`: `m + 1` nodes per axis for the grid, or one
/// random point in each of `m` strata per axis.
fn lattice(bx: &AxisBox, m: usize, mut rng: Option<&mut ChaCha8Rng>, mut visit: impl FnMut(&[f64])) {
    let n = bx.dim();
    let w = bx.widths();
    let per = if rng.is_some() { m } else { m + 1 };
    // degenerate axes collapse to a single node
    let counts: Vec<usize> = w.iter().map(|&wi| if wi > 0.0 { per } else { 1 }).collect();
    let mut idx = vec![0usize; n];
    let mut p = vec![0.0; n];
    loop {
        for i in 0..n {
            p[i] = if w[i] == 0.0 {
                bx.min[i]
            } else {
                match rng.as_deref_mut() {
                    None => bx.min[i] + w[i] * idx[i] as f64 / m as f64,
                    Some(r) => bx.min[i] + w[i] * (idx[i] as f64 + r.random::<f64>()) / m as f64,
                }
            };
        }
        visit(&p);
        let mut axis = 0;
        loop {
            if axis == n {
                return;
            }
            idx[axis] += 1;
            if idx[axis] < counts[axis] {
                break;
            }
            idx[axis] = 0;
            axis += 1;
        }
    }
}

/// Representative point for cylinders: the fixed point of map 1.
pub fn base_point(ifs: &IFSystem) -> Result<Vec<f64>> {
    let action = ifs.maps[0].action().ok_or(IakError::NoPointAction)?;
    action
        .fixed_point()
        .ok_or_else(|| IakError::Invariant("map 1 has no unique fixed point".into()))
}

/// One point `S_𝐢(x₀)` per word of the δ-stopping, `x₀` the fixed point of
/// map 1. The result lies within `diam(X)·δ` of `F_∅` in Hausdorff distance.
pub fn homogeneous_points(ifs: &IFSystem, delta: f64) -> Result<PointCloud> {
    let x0 = base_point(ifs)?;
    let mut cloud = PointCloud::new(ifs.ambient_dim());
    walk_stopping_tree(ifs, delta, |node, m| {
        if node == TreeNode::Leaf {
            cloud.push(&m.action().unwrap().apply(&x0));
        }
    })?;
    Ok(cloud)
}

/// Samples of the orbital set: C, the images `S_𝐢(C)` for words with
/// `Lip⁺(S_𝐢) >= δ`, and one representative per δ-stopping cylinder.
///
/// C is sampled with `samples_per_copy` points per axis; each image is
/// sampled with that count scaled by `Lip⁺(S_𝐢)` so image sample spacing
/// stays roughly constant.
pub fn orbital_points(
    ifs: &IFSystem,
    c: &CondensationSet,
    delta: f64,
    samples_per_copy: usize,
) -> Result<PointCloud> {
    orbital_points_with(ifs, c, delta, samples_per_copy, Sampling::Grid)
}

pub fn orbital_points_with(
    ifs: &IFSystem,
    c: &CondensationSet,
    delta: f64,
    samples_per_copy: usize,
    sampling: Sampling,
) -> Result<PointCloud> {
    if !ifs.has_point_action() {
        return Err(IakError::NoPointAction);
    }
    if c.dim() != ifs.ambient_dim() {
        return Err(IakError::InvalidInput("condensation set and system dimensions differ".into()));
    }
    let x0 = base_point(ifs)?;
    let mut cloud = c.sample(samples_per_copy, sampling, 0);
    let mut stream = 1u64;
    walk_stopping_tree(ifs, delta, |node, m| {
        let action = m.action().unwrap();
        match node {
            TreeNode::Internal => {
                let per = (samples_per_copy as f64 * m.lip_plus()).ceil() as usize;
                let samples = c.sample(per.max(1), sampling, stream);
                stream += 1;
                for p in samples.iter() {
                    cloud.push(&action.apply(p));
                }
            }
            TreeNode::Leaf => cloud.push(&action.apply(&x0)),
        }
    })?;
    Ok(cloud)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cantor() -> IFSystem {
        IFSystem::new(
            vec![
                ContractionMap::scaling(1.0 / 3.0, vec![0.0]).unwrap(),
                ContractionMap::scaling(1.0 / 3.0, vec![2.0 / 3.0]).unwrap(),
            ],
            1,
            SeparationFlags::default(),
        )
        .unwrap()
    }

    fn diag_pair() -> IFSystem {
        IFSystem::new(
            vec![
                ContractionMap::diagonal(&[0.5, 0.25], vec![0.0, 0.0]).unwrap(),
                ContractionMap::diagonal(&[0.25, 0.5], vec![0.75, 0.5]).unwrap(),
            ],
            2,
            SeparationFlags::default(),
        )
        .unwrap()
    }

    #[test]
    fn compose_similarity_word() {
        let m = compose(&cantor(), &Word::new(vec![1, 2])).unwrap();
        assert_relative_eq!(m.lip_plus(), 1.0 / 9.0, epsilon = 1e-16);
        assert_eq!(m.lip_plus(), m.lip_minus());
    }

    #[test]
    fn compose_empty_word_is_identity() {
        let m = compose(&cantor(), &Word::empty()).unwrap();
        assert_eq!(m.lip_plus(), 1.0);
        assert_eq!(apply(&m, &[0.3]).unwrap(), vec![0.3]);
    }

    #[test]
    fn compose_affine_product() {
        // diag(1/2,1/4)·diag(1/4,1/2) = diag(1/8,1/8)
        let m = compose(&diag_pair(), &Word::new(vec![1, 2])).unwrap();
        assert_relative_eq!(m.lip_plus(), 0.125, epsilon = 1e-16);
        assert_relative_eq!(m.lip_minus(), 0.125, epsilon = 1e-16);
    }

    #[test]
    fn compose_rejects_bad_letter() {
        let err = compose(&cantor(), &Word::new(vec![1, 3])).unwrap_err();
        assert_eq!(err, IakError::InvalidWord { letter: 3, alphabet: 2 });
        assert!(compose(&cantor(), &Word::new(vec![0])).is_err());
    }

    #[test]
    fn apply_examples() {
        let ifs = cantor();
        let s1 = compose(&ifs, &Word::new(vec![1])).unwrap();
        let s2 = compose(&ifs, &Word::new(vec![2])).unwrap();
        assert_relative_eq!(apply(&s1, &[0.9]).unwrap()[0], 0.3, epsilon = 1e-15);
        assert_relative_eq!(apply(&s2, &[0.0]).unwrap()[0], 2.0 / 3.0, epsilon = 1e-15);
        let id = compose(&diag_pair(), &Word::empty()).unwrap();
        assert_eq!(apply(&id, &[0.3, 0.7]).unwrap(), vec![0.3, 0.7]);
    }

    #[test]
    fn abstract_maps_have_no_action() {
        let ifs = IFSystem::new(
            vec![ContractionMap::abstract_lipschitz(0.5, 0.25).unwrap()],
            2,
            SeparationFlags::default(),
        )
        .unwrap();
        let m = compose(&ifs, &Word::new(vec![1, 1])).unwrap();
        assert!(!m.is_exact());
        assert_eq!(m.lip_plus(), 0.25);
        assert_eq!(m.lip_minus(), 0.0625);
        assert_eq!(apply(&m, &[0.0, 0.0]).unwrap_err(), IakError::NoPointAction);
        assert_eq!(homogeneous_points(&ifs, 0.5).unwrap_err(), IakError::NoPointAction);
        let c = CondensationSet::points(vec![vec![0.0, 0.0]]).unwrap();
        assert_eq!(orbital_points(&ifs, &c, 0.5, 1).unwrap_err(), IakError::NoPointAction);
    }

    #[test]
    fn map_invariants() {
        assert!(ContractionMap::scaling(1.2, vec![0.0]).is_err());
        assert!(ContractionMap::scaling(0.0, vec![0.0]).is_err());
        let skew = Matrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(ContractionMap::similarity(0.5, skew, Vector::zeros(2)).is_err());
        assert!(ContractionMap::diagonal(&[0.5, 0.0], vec![0.0, 0.0]).is_err());
        assert!(ContractionMap::diagonal(&[1.5, 0.2], vec![0.0, 0.0]).is_err());
        assert!(ContractionMap::abstract_lipschitz(0.3, 0.4).is_err());
        let flags = SeparationFlags { bounded_distortion: Some(1.0), ..Default::default() };
        assert!(IFSystem::new(vec![ContractionMap::scaling(0.5, vec![0.0]).unwrap()], 1, flags).is_err());
        let mixed = vec![
            ContractionMap::scaling(0.5, vec![0.0, 0.0]).unwrap(),
            ContractionMap::diagonal(&[0.5, 0.2], vec![0.0, 0.0]).unwrap(),
        ];
        assert!(IFSystem::new(mixed, 2, SeparationFlags::default()).is_err());
    }

    #[test]
    fn iterate_system_examples() {
        let ifs = cantor();
        let one = iterate_system(&ifs, 1).unwrap();
        assert_eq!(one.maps(), ifs.maps());
        let two = iterate_system(&ifs, 2).unwrap();
        assert_eq!(two.len(), 4);
        for m in two.maps() {
            assert_relative_eq!(m.similarity_ratio().unwrap(), 1.0 / 9.0, epsilon = 1e-16);
        }
        // lexicographic: 11, 12, 21, 22 send 0 to 0, 2/9, 2/3, 8/9
        let images: Vec<f64> = two.maps().iter().map(|m| m.action().unwrap().apply(&[0.0])[0]).collect();
        for (got, want) in images.iter().zip([0.0, 2.0 / 9.0, 2.0 / 3.0, 8.0 / 9.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn iterate_system_budget() {
        let three = IFSystem::new(
            (0..3).map(|i| ContractionMap::scaling(0.2, vec![0.4 * i as f64]).unwrap()).collect(),
            1,
            SeparationFlags::default(),
        )
        .unwrap();
        match iterate_system(&three, 13).unwrap_err() {
            IakError::BudgetExceeded { needed, budget } => {
                assert_eq!(needed, 1_594_323);
                assert_eq!(budget, 1_000_000);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn level_doubling_matches_direct_composition() {
        let ifs = diag_pair();
        let level = Level::build(&ifs, 5, WordBudget::default()).unwrap();
        let words = Word::all_of_length(2, 5);
        assert_eq!(level.len(), words.len());
        for (w, (p, m)) in words.iter().zip(level.lips()) {
            let c = compose(&ifs, w).unwrap();
            assert_relative_eq!(c.lip_plus(), *p, max_relative = 1e-12);
            assert_relative_eq!(c.lip_minus(), *m, max_relative = 1e-12);
        }
    }

    #[test]
    fn homogeneous_points_examples() {
        let ifs = cantor();
        let pts = homogeneous_points(&ifs, 0.4).unwrap().to_points();
        assert_eq!(pts.len(), 2);
        assert_relative_eq!(pts[0][0], 0.0);
        assert_relative_eq!(pts[1][0], 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(homogeneous_points(&ifs, 1.0).unwrap().len(), 2);
        // 1/9 is not below 0.1, so length-3 words are needed
        assert_eq!(homogeneous_points(&ifs, 0.1).unwrap().len(), 8);
        assert_eq!(homogeneous_points(&ifs, 0.12).unwrap().len(), 4);
    }

    #[test]
    fn orbital_points_single_point_counts() {
        let ifs = cantor();
        let c = CondensationSet::points(vec![vec![0.5]]).unwrap();
        // δ = 0.2: length-1 words are internal, length-2 words stop
        let cloud = orbital_points(&ifs, &c, 0.2, 8).unwrap();
        assert_eq!(cloud.len(), 1 + 2 + 4);
    }

    #[test]
    fn orbital_points_dyadic() {
        let ifs = IFSystem::new(
            vec![
                ContractionMap::scaling(0.5, vec![0.0]).unwrap(),
                ContractionMap::scaling(0.5, vec![0.5]).unwrap(),
            ],
            1,
            SeparationFlags::default(),
        )
        .unwrap();
        let c = CondensationSet::points(vec![vec![1.0]]).unwrap();
        let mut xs: Vec<f64> = orbital_points(&ifs, &c, 0.6, 4).unwrap().iter().map(|p| p[0]).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(xs, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn condensation_defaults() {
        let s = CondensationSet::segment(vec![0.0, 0.0], vec![3.0, 4.0]).unwrap();
        assert_eq!(s.box_dim(), 1.0);
        assert_eq!(s.hausdorff().unwrap().measure, 5.0);
        let b = CondensationSet::axis_box(vec![0.25, 0.5], vec![0.5, 0.5]).unwrap();
        assert!(b.is_full_dimensional());
        assert_eq!(b.hausdorff().unwrap().measure, 0.25);
        let flat = CondensationSet::axis_box(vec![0.0, 0.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(flat.box_dim(), 1.0);
        assert!(!flat.is_full_dimensional());
        let d = CondensationSet::disk(vec![0.0, 0.0], 2.0).unwrap();
        assert_relative_eq!(d.hausdorff().unwrap().measure, 4.0 * std::f64::consts::PI, epsilon = 1e-12);
        assert_relative_eq!(unit_ball_volume(3), 4.0 / 3.0 * std::f64::consts::PI, epsilon = 1e-12);
        assert!(CondensationSet::points(vec![]).is_err());
    }

    #[test]
    fn sampling_shapes() {
        let s = CondensationSet::segment(vec![0.0], vec![1.0]).unwrap();
        assert_eq!(s.sample(10, Sampling::Grid, 0).len(), 11);
        let j1 = s.sample(10, Sampling::Jittered(7), 3);
        let j2 = s.sample(10, Sampling::Jittered(7), 3);
        assert_eq!(j1, j2);
        assert_ne!(j1, s.sample(10, Sampling::Jittered(7), 4));
        let b = CondensationSet::axis_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(b.sample(4, Sampling::Grid, 0).len(), 25);
        let d = CondensationSet::disk(vec![0.0, 0.0], 1.0).unwrap();
        for p in d.sample(20, Sampling::Jittered(1), 0).iter() {
            assert!(d.contains(p, 1e-12));
        }
    }
}
