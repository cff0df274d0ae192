use super::ranking::{tag_score_vec, TagRanking, TagRetrieval};
use super::{PreferenceVector, RankingMode, WeightVector};
use crate::error::{Error, Result};
use crate::graph::{GraphModel, NodeId};

/// Parameters of iterative spreading.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpreadParams {
    /// Dampening factor: the share of each update taken from the preference
    /// vector.
    pub d: f64,
    /// Stop once the summed absolute change drops below `epsilon * tw`.
    pub epsilon: f64,
    pub max_iterations: usize,
    /// Total weight TW of the graph.
    pub tw: f64,
}

impl Default for SpreadParams {
    fn default() -> Self {
        SpreadParams {
            d: 0.1,
            epsilon: 1e-6,
            max_iterations: 200,
            tw: 1.0,
        }
    }
}

impl SpreadParams {
    fn check(&self) -> Result<()> {
        if !(self.d > 0.0 && self.d <= 1.0) {
            return Err(Error::InvalidArgument(format!("d = {} is outside (0, 1]", self.d)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon = {} must be positive", self.epsilon)));
        }
        if !(self.tw.is_finite() && self.tw > 0.0) {
            return Err(Error::InvalidArgument(format!("tw = {} must be positive", self.tw)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max-iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// Dense preference vector giving every node `tw / |N|`.
pub fn uniform_preferences(graph: &GraphModel, tw: f64) -> Vec<f64> {
    let n = graph.node_count();
    vec![tw / n.max(1) as f64; n]
}

/// Iterates `w <- (1 - d) A w + d p` from uniform starting weights until
/// convergence. `prefs` must sum to `params.tw`.
pub fn folkrank_spread(
    graph: &GraphModel,
    prefs: &PreferenceVector,
    params: &SpreadParams,
) -> Result<WeightVector> {
    if (prefs.total() - params.tw).abs() > 1e-9 * params.tw {
        return Err(Error::InvalidArgument(format!(
            "preference total {} differs from tw {}",
            prefs.total(),
            params.tw
        )));
    }
    folkrank_spread_observed(graph, &prefs.to_dense(graph.node_count()), params, |_, _| {})
}

/// [`folkrank_spread`] over a dense preference vector, calling `observer`
/// with the iteration number and the weights after every iteration.
///
/// Weight on nodes without edges cannot follow an edge and is handed to the
/// damping term instead, distributed like `p`.
pub fn folkrank_spread_observed(
    graph: &GraphModel,
    p: &[f64],
    params: &SpreadParams,
    mut observer: impl FnMut(usize, &[f64]),
) -> Result<WeightVector> {
    params.check()?;
    let n = graph.node_count();
    if p.len() != n {
        return Err(Error::InvalidArgument(format!(
            "preference vector has {} entries for {n} nodes",
            p.len()
        )));
    }
    if n == 0 {
        return Ok(WeightVector::zeros(0));
    }
    let pw: f64 = p.iter().sum();
    if !(pw > 0.0) {
        return Err(Error::NoPreferenceNodes);
    }
    let (offsets, targets, weights) = graph.csr();
    let totals = graph.totals();
    let d = params.d;
    let threshold = params.epsilon * params.tw;

    let mut w = vec![params.tw / n as f64; n];
    let mut next = vec![0.0; n];
    let mut traversed = 0u64;
    let mut residual = f64::INFINITY;
    for iteration in 1..=params.max_iterations {
        for (x, &pi) in next.iter_mut().zip(p) {
            *x = d * pi;
        }
        let mut dangling = 0.0;
        for i in 0..n {
            let wi = w[i];
            if wi == 0.0 {
                continue;
            }
            if totals[i] <= 0.0 {
                dangling += wi;
                continue;
            }
            let share = (1.0 - d) * wi / totals[i];
            for k in offsets[i]..offsets[i + 1] {
                next[targets[k].index()] += share * weights[k];
            }
        }
        if dangling > 0.0 {
            let scale = (1.0 - d) * dangling / pw;
            for (x, &pi) in next.iter_mut().zip(p) {
                *x += scale * pi;
            }
        }
        traversed += targets.len() as u64;
        residual = w.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut w, &mut next);
        observer(iteration, &w);
        if residual < threshold {
            return Ok(WeightVector {
                weights: w,
                iterations: iteration,
                edges_traversed: traversed,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: params.max_iterations,
        residual,
        last: Box::new(WeightVector {
            weights: w,
            iterations: params.max_iterations,
            edges_traversed: traversed,
        }),
    })
}

/// Ranks tags by personalized minus global weight.
///
/// `prefs` is the full personalized vector: a small uniform preference on
/// every node plus extra weight on the query nodes. The global run uses
/// uniform preferences and is subtracted at the share of the total that
/// the personalized vector spends uniformly (its smallest entry times
/// `|N|`), leaving the spread of the extra weight alone. A uniform `prefs`
/// therefore scores every tag 0.
pub fn differential_rank(
    graph: &GraphModel,
    prefs: &PreferenceVector,
    params: &SpreadParams,
    retrieval: TagRetrieval,
) -> Result<TagRanking> {
    let global = folkrank_spread_observed(graph, &uniform_preferences(graph, params.tw), params, |_, _| {})?;
    differential_from_global(graph, prefs, params, retrieval, &global)
}

/// `background` of the total spread uniformly over all nodes and the rest
/// over `prefs`, in proportion.
pub fn with_background(
    graph: &GraphModel,
    prefs: &PreferenceVector,
    tw: f64,
    background: f64,
) -> Result<PreferenceVector> {
    if !(0.0..1.0).contains(&background) {
        return Err(Error::InvalidArgument(format!(
            "background share {background} is outside [0, 1)"
        )));
    }
    let mut p = uniform_preferences(graph, tw * background);
    let scale = if prefs.total() > 0.0 {
        (1.0 - background) * tw / prefs.total()
    } else {
        0.0
    };
    for &(node, w) in prefs.entries() {
        p[node.index()] += w * scale;
    }
    PreferenceVector::new(p.into_iter().enumerate().map(|(i, w)| (NodeId(i as u32), w)))
}

pub(crate) fn differential_from_global(
    graph: &GraphModel,
    prefs: &PreferenceVector,
    params: &SpreadParams,
    retrieval: TagRetrieval,
    global: &WeightVector,
) -> Result<TagRanking> {
    let n = graph.node_count();
    let p = prefs.to_dense(n);
    let floor = p.iter().copied().fold(f64::INFINITY, f64::min);
    let share = if n == 0 { 0.0 } else { (floor * n as f64 / params.tw).min(1.0) };
    let personal = folkrank_spread_observed(graph, &p, params, |_, _| {})?;
    let ps = tag_score_vec(&personal.weights, graph, retrieval)?;
    let gs = tag_score_vec(&global.weights, graph, retrieval)?;
    let scores = ps.iter().zip(&gs).map(|(a, b)| a - share * b).collect::<Vec<_>>();
    Ok(TagRanking::from_tag_vec(graph, RankingMode::Differential, &scores, params.tw, false))
}
