//! Distances between interpretations and knowledge bases, and graded
//! fidelity of a network to a knowledge base.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::encoding::{compute_m_n, fuzzy_interpretations, EncodingSpec};
use crate::logic::models::compile_sentences;
use crate::logic::{
    enumerate_models, evaluate_fuzzy, kb_universe, mask_string, Annotation, FuzzyConfig, Interpretation,
    InterpretationSet, KnowledgeBase, LogicError, PropExpr, TNorm, Universe,
};
use crate::network::Network;
use crate::scalar::{pairwise_sum, Scalar};
use crate::Error;

/// Largest number of atoms exact weighted model counting accepts.
pub const MAX_WMC_ATOMS: usize = 20;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FidelityError {
    #[error("invalid fidelity configuration: {0}")]
    Config(String),

    #[error("{0} is empty")]
    Empty(&'static str),

    #[error("knowledge base is unsatisfiable over the given atoms")]
    Unsatisfiable,

    #[error("sentence {0} carries no fuzzy interval")]
    NotFuzzy(usize),

    #[error("{atoms} atoms exceed the model-counting limit of {max}")]
    TooManyAtoms { atoms: usize, max: usize },

    #[error("atom `{0}` has no probability")]
    MissingProbability(String),

    #[error("probability {value} of `{atom}` is outside [0, 1]")]
    BadProbability { atom: String, value: f64 },

    #[error("constraint has probability 0")]
    ZeroProbability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BaseDistance {
    /// 0 for equal interpretations, 1 otherwise.
    Discrete,
    /// Fraction of atoms with different values.
    #[default]
    Eq1Fraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SatAgg {
    #[default]
    Min,
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityConfig {
    pub base: BaseDistance,
    pub d_max: f64,
    pub sat_agg: SatAgg,
    pub tnorm: TNorm,
}

impl Default for FidelityConfig {
    fn default() -> Self {
        FidelityConfig {
            base: BaseDistance::Eq1Fraction,
            d_max: 1.0,
            sat_agg: SatAgg::Min,
            tnorm: TNorm::Product,
        }
    }
}

impl FidelityConfig {
    pub fn validate(&self) -> Result<(), FidelityError> {
        if self.d_max > 0.0 && self.d_max.is_finite() {
            Ok(())
        } else {
            Err(FidelityError::Config(format!("d_max must be positive, got {}", self.d_max)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub measure: String,
    pub value: f64,
    /// Interpretation or sentence attaining the extremum.
    pub witness: Option<String>,
    /// Subset verdict `∅ ⊂ M_N ⊆ M_L`, reported next to the equality-based
    /// Hausdorff value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neural_model: Option<bool>,
}

fn same_universe(a: &Arc<Universe>, b: &Arc<Universe>) -> Result<(), LogicError> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(LogicError::UniverseMismatch)
    }
}

/// `Σ_a |M1(a) − M2(a)| / |At|`. Graded values are allowed.
pub fn distance_interpretations<T: Scalar>(m1: &Interpretation<T>, m2: &Interpretation<T>) -> Result<T, LogicError> {
    same_universe(m1.universe(), m2.universe())?;
    let n = m1.values().len();
    if n == 0 {
        return Ok(T::zero());
    }
    let diffs: Vec<T> = m1.values().iter().zip(m2.values()).map(|(a, b)| (*a - *b).abs()).collect();
    Ok(pairwise_sum(&diffs) / T::lit(n as f64))
}

/// Minimum distance from `m` to a model of `l`, with the nearest model.
/// The atoms of `l` must belong to `m`'s universe.
pub fn distance_to_kb(m: &Interpretation<f64>, l: &KnowledgeBase) -> Result<(f64, Interpretation<f64>), Error> {
    let u = m.universe().clone();
    if u.merged(&kb_universe(l)).len() != u.len() {
        return Err(LogicError::UniverseMismatch.into());
    }
    let models = enumerate_models(l, &u)?.masks()?;
    let target = m.to_mask()?;
    let n = u.len().max(1) as f64;
    let best = models
        .iter()
        .min_by_key(|&&w| ((w ^ target).count_ones(), w))
        .ok_or(FidelityError::Unsatisfiable)?;
    Ok(((best ^ target).count_ones() as f64 / n, Interpretation::from_mask(u, *best)))
}

fn base_distance(base: BaseDistance, a: u64, b: u64, n: usize) -> f64 {
    match base {
        BaseDistance::Discrete => f64::from(u8::from(a != b)),
        BaseDistance::Eq1Fraction => (a ^ b).count_ones() as f64 / n.max(1) as f64,
    }
}

/// For each member of `from`, the distance to the nearest member of `to`.
fn nearest(base: BaseDistance, from: &[u64], to: &[u64], n: usize) -> Vec<f64> {
    if base == BaseDistance::Eq1Fraction && n <= 24 && (from.len() * to.len()) > (n << n).max(1) {
        // multi-source BFS on the hypercube gives every Hamming distance at once
        let mut dist = vec![u32::MAX; 1 << n];
        let mut queue = VecDeque::new();
        for &t in to {
            dist[t as usize] = 0;
            queue.push_back(t as usize);
        }
        while let Some(v) = queue.pop_front() {
            for i in 0..n {
                let w = v ^ (1 << i);
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        return from.iter().map(|&a| dist[a as usize] as f64 / n as f64).collect();
    }
    from.iter()
        .map(|&a| to.iter().map(|&b| base_distance(base, a, b, n)).fold(f64::INFINITY, f64::min))
        .collect()
}

/// Symmetric sup-of-inf distance between two explicit sets, with the member
/// attaining it.
pub fn hausdorff(a: &InterpretationSet, b: &InterpretationSet, base: BaseDistance) -> Result<(f64, u64), Error> {
    same_universe(a.universe(), b.universe())?;
    let (ma, mb) = (a.masks()?, b.masks()?);
    if ma.is_empty() || mb.is_empty() {
        return Err(FidelityError::Empty("interpretation set").into());
    }
    let n = a.universe().len();
    let mut best = (0.0, ma[0]);
    for (set, d) in [(&ma, nearest(base, &ma, &mb, n)), (&mb, nearest(base, &mb, &ma, n))] {
        for (x, d) in set.iter().zip(d) {
            if d > best.0 {
                best = (d, *x);
            }
        }
    }
    Ok(best)
}

/// `max(0, d_max − d_H(M_N, M_L)) / d_max` on precomputed sets.
pub fn fidelity_sets(m_n: &InterpretationSet, l: &KnowledgeBase, cfg: &FidelityConfig) -> Result<FidelityReport, Error> {
    cfg.validate()?;
    let u = Arc::new(kb_universe(l).merged(m_n.universe()));
    let m_n = m_n.reindex(&u)?.to_explicit()?;
    let m_l = enumerate_models(l, &u)?;
    if m_n.is_empty() {
        return Err(FidelityError::Empty("M_N").into());
    }
    if m_l.is_empty() {
        return Err(FidelityError::Empty("M_L").into());
    }
    let (d, at) = hausdorff(&m_n, &m_l, cfg.base)?;
    Ok(FidelityReport {
        measure: "hausdorff".into(),
        value: (cfg.d_max - d).max(0.0) / cfg.d_max,
        witness: Some(Interpretation::<f64>::from_mask(u.clone(), at).to_string()),
        neural_model: Some(m_n.is_subset(&m_l)?),
    })
}

pub fn fidelity_hausdorff<T: Scalar>(
    net: &Network<T>,
    spec: &EncodingSpec,
    l: &KnowledgeBase,
    cfg: &FidelityConfig,
) -> Result<FidelityReport, Error> {
    fidelity_sets(&compute_m_n(net, spec)?.m_n, l, cfg)
}

fn interval_distance(v: f64, lo: f64, hi: f64) -> f64 {
    (lo - v).max(v - hi).max(0.0)
}

/// Fuzzy fidelity of explicit graded interpretations: the infimum over `ms`
/// of the aggregated `1 − d(M(φ), [a, b])`.
pub fn fid_fuzzy_interpretations<T: Scalar>(
    ms: &[Interpretation<T>],
    l: &KnowledgeBase,
    cfg: &FidelityConfig,
) -> Result<FidelityReport, Error> {
    let mut intervals = Vec::new();
    for (k, s) in l.sentences.iter().enumerate() {
        match s.annotation {
            Annotation::Fuzzy { lo, hi } => intervals.push((lo, hi)),
            _ => return Err(FidelityError::NotFuzzy(k).into()),
        }
    }
    if ms.is_empty() {
        return Err(FidelityError::Empty("M_N").into());
    }
    let fc = FuzzyConfig::new(cfg.tnorm);
    let mut best: Option<(f64, String)> = None;
    for m in ms {
        let mut agg = 1.0;
        let mut worst = (f64::INFINITY, 0);
        for (k, (s, &(lo, hi))) in l.sentences.iter().zip(&intervals).enumerate() {
            let v = evaluate_fuzzy(&s.formula, m, &fc)?.as_f64();
            let score = 1.0 - interval_distance(v, lo, hi);
            if score < worst.0 {
                worst = (score, k);
            }
            agg = match cfg.sat_agg {
                SatAgg::Min => f64::min(agg, score),
                SatAgg::Product => agg * score,
            };
        }
        if best.as_ref().is_none_or(|(b, _)| agg < *b) {
            let witness = if l.sentences.is_empty() {
                m.to_string()
            } else {
                format!("{m} violates `{}` most", l.sentences[worst.1].formula)
            };
            best = Some((agg, witness));
        }
    }
    let (value, witness) = best.expect("non-empty");
    Ok(FidelityReport {
        measure: "fuzzy".into(),
        value,
        witness: Some(witness),
        neural_model: None,
    })
}

pub fn fid_fuzzy<T: Scalar>(
    net: &Network<T>,
    spec: &EncodingSpec,
    l: &KnowledgeBase,
    cfg: &FidelityConfig,
) -> Result<FidelityReport, Error> {
    fid_fuzzy_interpretations(&fuzzy_interpretations(net, spec)?, l, cfg)
}

/// Exact weighted model count with its gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct Wmc<T> {
    /// Probability that the constraint holds.
    pub p: T,
    /// `∂p/∂prob_i` for each atom of the probability vector.
    pub grad: Vec<T>,
    /// Most probable model, as a mask over the probability vector's atoms.
    pub mode: Option<u64>,
}

/// Exact weighted model count of `l` when every atom of `probs` is true
/// independently with its given value. Only the atoms mentioned by `l` are
/// enumerated.
pub fn wmc<T: Scalar>(probs: &Interpretation<T>, l: &KnowledgeBase) -> Result<Wmc<T>, Error> {
    let pu = probs.universe();
    for (i, &p) in probs.values().iter().enumerate() {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(FidelityError::BadProbability {
                atom: pu.atom(i).to_string(),
                value: p.as_f64(),
            }
            .into());
        }
    }
    let lu = kb_universe(l);
    let idx = lu
        .atoms()
        .map(|a| pu.index_of(a).ok_or_else(|| FidelityError::MissingProbability(a.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let n = idx.len();
    if n > MAX_WMC_ATOMS {
        return Err(FidelityError::TooManyAtoms {
            atoms: n,
            max: MAX_WMC_ATOMS,
        }
        .into());
    }
    let expr = PropExpr::all(compile_sentences(l, &lu)?);
    let p: Vec<T> = idx.iter().map(|&i| probs.get(i)).collect();
    let worlds = 1u64 << n;
    let mut weights = Vec::new();
    let mut grads: Vec<Vec<T>> = vec![Vec::new(); n];
    let mut mode: Option<(T, u64)> = None;
    let mut prefix = vec![T::one(); n + 1];
    let mut suffix = vec![T::one(); n + 1];
    for word in 0..worlds.div_ceil(64) {
        let mut hits = expr.eval_word(word);
        if worlds < 64 {
            hits &= (1u64 << worlds) - 1;
        }
        while hits != 0 {
            let j = hits.trailing_zeros() as u64;
            hits &= hits - 1;
            let w = word * 64 + j;
            let f = |i: usize| if w >> i & 1 == 1 { p[i] } else { T::one() - p[i] };
            for i in 0..n {
                prefix[i + 1] = prefix[i] * f(i);
            }
            for i in (0..n).rev() {
                suffix[i] = suffix[i + 1] * f(i);
            }
            let weight = prefix[n];
            weights.push(weight);
            if mode.is_none_or(|(b, _)| weight > b) {
                mode = Some((weight, w));
            }
            for (i, g) in grads.iter_mut().enumerate() {
                let rest = prefix[i] * suffix[i + 1];
                g.push(if w >> i & 1 == 1 { rest } else { -rest });
            }
        }
    }
    let mut grad = vec![T::zero(); pu.len()];
    for (k, &i) in idx.iter().enumerate() {
        grad[i] = pairwise_sum(&grads[k]);
    }
    let mode = mode.map(|(_, w)| {
        let mut m = 0u64;
        for (k, &i) in idx.iter().enumerate() {
            if w >> k & 1 == 1 {
                m |= 1 << i;
            }
        }
        m
    });
    Ok(Wmc {
        p: pairwise_sum(&weights),
        grad,
        mode,
    })
}

/// `P(M ∈ M_L)` for independent atom probabilities.
pub fn fid_prob<T: Scalar>(probs: &Interpretation<T>, l: &KnowledgeBase) -> Result<FidelityReport, Error> {
    let r = wmc(probs, l)?;
    let n = probs.universe().len();
    Ok(FidelityReport {
        measure: "prob".into(),
        value: r.p.as_f64(),
        witness: r.mode.filter(|_| n <= 64).map(|m| {
            let u = probs.universe();
            let on: Vec<String> = (0..n).filter(|&i| m >> i & 1 == 1).map(|i| u.atom(i).to_string()).collect();
            format!("most probable model {}: {{{}}}", mask_string(m, n), on.join(", "))
        }),
        neural_model: None,
    })
}

/// Probability fidelity of a network: the outputs of each limit state are
/// read as activation probabilities and the states are weighted uniformly.
pub fn fid_prob_network<T: Scalar>(
    net: &Network<T>,
    spec: &EncodingSpec,
    l: &KnowledgeBase,
) -> Result<FidelityReport, Error> {
    let ms = fuzzy_interpretations(net, spec)?;
    if ms.is_empty() {
        return Err(FidelityError::Empty("M_N").into());
    }
    let ps = ms.iter().map(|m| Ok(wmc(m, l)?.p)).collect::<Result<Vec<T>, Error>>()?;
    Ok(FidelityReport {
        measure: "prob".into(),
        value: pairwise_sum(&ps).as_f64() / ps.len() as f64,
        witness: None,
        neural_model: None,
    })
}
