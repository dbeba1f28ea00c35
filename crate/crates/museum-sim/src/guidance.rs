//! The smart-ticket brain: route recommendation over the unvisited
//! exhibits, per-object info delivery with language fallback, remaining
//! time estimation, and survey capture.
//!
//! Routing is an open traveling-salesman path over the shortest-walk
//! metric. Up to [`EXACT_TARGET_LIMIT`] targets it is solved exactly
//! (subset dynamic program, lexicographic tie-break on node ids); beyond
//! that, nearest-neighbor seeded 2-opt.

use crate::model::{
    ExhibitObject, LanguageCode, NodeId, ObjectId, RoutingMode, SmartTicket, StUplink,
    SurveyResponse,
};
use crate::museum::Museum;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Largest target count solved exactly.
pub const EXACT_TARGET_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GuidanceError {
    #[error("no route: object {0} is unreachable from the current node")]
    Unreachable(ObjectId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("object {0} is not placed on any exhibit node")]
    ObjectNotPlaced(ObjectId),
    #[error("route requested with no unvisited objects")]
    EmptyUnvisited,
    #[error("object {0} has no info record for the requested or default language")]
    NoInfo(ObjectId),
    #[error("survey already submitted for ticket")]
    DuplicateSurvey,
    #[error("survey response is malformed (duplicate questions or rating outside 1..=5)")]
    MalformedSurvey,
}

/// A routing request from one smart ticket.
#[derive(Debug, Clone)]
pub struct RouteRequest {
    pub current_node: NodeId,
    pub unvisited: BTreeSet<ObjectId>,
    pub mode: RoutingMode,
    /// Current dwellers per object; missing entries count as zero.
    pub crowd: BTreeMap<ObjectId, u32>,
    /// Crowd penalty weight; ignored in shortest mode.
    pub alpha: f64,
}

impl RouteRequest {
    pub fn shortest(current_node: NodeId, unvisited: BTreeSet<ObjectId>) -> Self {
        RouteRequest {
            current_node,
            unvisited,
            mode: RoutingMode::Shortest,
            crowd: BTreeMap::new(),
            alpha: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteLeg {
    /// Waypoint this leg ends on.
    pub to: NodeId,
    pub walk_seconds: u64,
    /// Walk time scaled by the crowd penalty of the destination.
    pub cost: f64,
}

/// A recommended visiting plan.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutePlan {
    /// Waypoints: the current node followed by each target exhibit node
    /// exactly once, in visiting order.
    pub order: Vec<NodeId>,
    /// Fully expanded walk; consecutive entries are adjacent in the map.
    pub path: Vec<NodeId>,
    pub legs: Vec<RouteLeg>,
    pub total_walk_seconds: u64,
    pub total_cost: f64,
}

struct CostModel {
    /// walk[i][j]: shortest walk seconds between waypoints i and j
    /// (index 0 = start, 1.. = targets).
    walk: Vec<Vec<u64>>,
    /// Crowd multiplier per target (1 + alpha * crowd).
    multiplier: Vec<f64>,
}

impl CostModel {
    fn leg_cost(&self, from: usize, to_target: usize) -> f64 {
        self.walk[from][to_target + 1] as f64 * self.multiplier[to_target]
    }
}

/// Recommend a visiting order over the unvisited objects.
///
/// Shortest mode minimizes total walk time; crowd-balanced mode minimizes
/// `sum(walk_time * (1 + alpha * crowd(destination)))`. Cost ties resolve
/// to the lexicographically smallest node-id sequence in the exact tier.
pub fn recommend_route(museum: &Museum, req: &RouteRequest) -> Result<RoutePlan, GuidanceError> {
    if req.unvisited.is_empty() {
        return Err(GuidanceError::EmptyUnvisited);
    }
    let routes = &museum.routes;
    if routes.index_of(&req.current_node).is_none() {
        return Err(GuidanceError::UnknownNode(req.current_node.clone()));
    }

    // Targets sorted by node id so index order is lexicographic.
    let mut targets: Vec<(NodeId, ObjectId)> = Vec::with_capacity(req.unvisited.len());
    for object_id in &req.unvisited {
        let node = museum
            .object_nodes
            .get(object_id)
            .ok_or_else(|| GuidanceError::ObjectNotPlaced(object_id.clone()))?;
        targets.push((node.clone(), object_id.clone()));
    }
    targets.sort();

    let n = targets.len();
    let mut waypoints: Vec<NodeId> = Vec::with_capacity(n + 1);
    waypoints.push(req.current_node.clone());
    waypoints.extend(targets.iter().map(|(node, _)| node.clone()));

    let mut walk = vec![vec![0u64; n + 1]; n + 1];
    for i in 0..=n {
        for j in (i + 1)..=n {
            let d = routes
                .walk_time(&waypoints[i], &waypoints[j])
                .ok_or_else(|| {
                    let unreachable = if j == 0 { i } else { j };
                    GuidanceError::Unreachable(targets[unreachable - 1].1.clone())
                })?;
            walk[i][j] = d;
            walk[j][i] = d;
        }
    }

    let multiplier: Vec<f64> = targets
        .iter()
        .map(|(_, object_id)| match req.mode {
            RoutingMode::Shortest => 1.0,
            RoutingMode::CrowdBalanced => {
                1.0 + req.alpha * f64::from(req.crowd.get(object_id).copied().unwrap_or(0))
            }
        })
        .collect();
    let model = CostModel { walk, multiplier };

    let visit_order = if n <= EXACT_TARGET_LIMIT {
        exact_order(&model, n)
    } else {
        heuristic_order(&model, n)
    };

    Ok(assemble_plan(museum, req, &waypoints, &model, &visit_order))
}

/// Exact optimum by dynamic programming over target subsets, with a forward
/// reconstruction that always picks the smallest node index among optimal
/// continuations, yielding the lexicographically smallest optimal order.
fn exact_order(model: &CostModel, n: usize) -> Vec<usize> {
    let full = (1usize << n) - 1;
    // finish[from][mask]: cheapest cost to visit every target in mask
    // starting at `from` (n = the start node).
    let mut finish = vec![vec![0.0f64; full + 1]; n + 1];
    for mask in 1..=full {
        for from in 0..=n {
            let mut best = f64::INFINITY;
            for k in 0..n {
                if mask & (1 << k) == 0 {
                    continue;
                }
                let cost = leg(model, from, k, n) + finish[k][mask & !(1 << k)];
                if cost < best {
                    best = cost;
                }
            }
            finish[from][mask] = best;
        }
    }

    let mut order = Vec::with_capacity(n);
    let mut from = n;
    let mut mask = full;
    while mask != 0 {
        let target_cost = finish[from][mask];
        for k in 0..n {
            if mask & (1 << k) == 0 {
                continue;
            }
            let cost = leg(model, from, k, n) + finish[k][mask & !(1 << k)];
            if cost == target_cost {
                order.push(k);
                mask &= !(1 << k);
                from = k;
                break;
            }
        }
    }
    order
}

fn leg(model: &CostModel, from: usize, to_target: usize, n: usize) -> f64 {
    // `from` is a target index, or n for the start node.
    let from_index = if from == n { 0 } else { from + 1 };
    model.walk[from_index][to_target + 1] as f64 * model.multiplier[to_target]
}

fn order_cost(model: &CostModel, order: &[usize], n: usize) -> f64 {
    let mut cost = 0.0;
    let mut from = n;
    for &k in order {
        cost += leg(model, from, k, n);
        from = k;
    }
    cost
}

/// Nearest-neighbor seed (ties to the smaller node index) improved by
/// best-improvement 2-opt segment reversals on the open path.
fn heuristic_order(model: &CostModel, n: usize) -> Vec<usize> {
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    let mut from = n;
    while !remaining.is_empty() {
        let mut best_pos = 0;
        let mut best_cost = f64::INFINITY;
        for (pos, &k) in remaining.iter().enumerate() {
            let cost = leg(model, from, k, n);
            if cost < best_cost {
                best_cost = cost;
                best_pos = pos;
            }
        }
        from = remaining.remove(best_pos);
        order.push(from);
    }

    let mut cost = order_cost(model, &order, n);
    loop {
        let mut best_swap: Option<(usize, usize, f64)> = None;
        for i in 0..n - 1 {
            for j in (i + 1)..n {
                order[i..=j].reverse();
                let candidate = order_cost(model, &order, n);
                order[i..=j].reverse();
                if candidate < cost && best_swap.is_none_or(|(_, _, c)| candidate < c) {
                    best_swap = Some((i, j, candidate));
                }
            }
        }
        match best_swap {
            Some((i, j, new_cost)) => {
                order[i..=j].reverse();
                cost = new_cost;
            }
            None => break,
        }
    }
    order
}

fn assemble_plan(
    museum: &Museum,
    req: &RouteRequest,
    waypoints: &[NodeId],
    model: &CostModel,
    visit_order: &[usize],
) -> RoutePlan {
    let n = visit_order.len();
    let mut order = Vec::with_capacity(n + 1);
    order.push(req.current_node.clone());
    let mut legs = Vec::with_capacity(n);
    let mut path = vec![req.current_node.clone()];
    let mut total_walk = 0u64;
    let mut total_cost = 0.0;
    let mut from = n;
    for &k in visit_order {
        let from_index = if from == n { 0 } else { from + 1 };
        let walk_seconds = model.walk[from_index][k + 1];
        let cost = leg(model, from, k, n);
        let to = waypoints[k + 1].clone();
        let hop = museum
            .routes
            .path(&order.last().unwrap().clone(), &to)
            .expect("reachability checked while building the cost matrix");
        path.extend(hop.into_iter().skip(1));
        order.push(to.clone());
        legs.push(RouteLeg {
            to,
            walk_seconds,
            cost,
        });
        total_walk += walk_seconds;
        total_cost += cost;
        from = k;
    }
    RoutePlan {
        order,
        path,
        legs,
        total_walk_seconds: total_walk,
        total_cost,
    }
}

/// Estimated seconds to finish the visit: mean observed dwell (or the
/// configured default before any history) per unvisited object, plus the
/// walk time of the shortest-mode plan over them. Zero when done.
pub fn estimate_remaining_time(
    ticket: &SmartTicket,
    unvisited: &BTreeSet<ObjectId>,
    museum: &Museum,
    default_dwell_seconds: u64,
) -> Result<f64, GuidanceError> {
    if unvisited.is_empty() {
        return Ok(0.0);
    }
    let current_node = ticket
        .visited
        .last()
        .map(|v| museum.object_nodes[&v.object_id].clone())
        .unwrap_or_else(|| museum.entry_gates[0].clone());
    let plan = recommend_route(
        museum,
        &RouteRequest::shortest(current_node, unvisited.clone()),
    )?;
    let dwell = ticket
        .mean_dwell()
        .unwrap_or(default_dwell_seconds as f64);
    Ok(dwell * unvisited.len() as f64 + plan.total_walk_seconds as f64)
}

/// Result of an info lookup on a smart ticket.
#[derive(Debug, Clone, PartialEq)]
pub struct InfoLookup {
    pub language: LanguageCode,
    pub record: String,
    /// True when the requested language was missing and the default served.
    pub fallback: bool,
}

/// Fetch the info record for `requested`, falling back to the default
/// language when missing.
pub fn lookup_object_info(
    object: &ExhibitObject,
    requested: &LanguageCode,
    default: &LanguageCode,
) -> Result<InfoLookup, GuidanceError> {
    if let Some(record) = object.info.get(requested) {
        return Ok(InfoLookup {
            language: requested.clone(),
            record: record.clone(),
            fallback: false,
        });
    }
    if let Some(record) = object.info.get(default) {
        return Ok(InfoLookup {
            language: default.clone(),
            record: record.clone(),
            fallback: true,
        });
    }
    Err(GuidanceError::NoInfo(object.object_id.clone()))
}

/// Record the survey on the ticket and produce the message-1 payload that
/// carries it (response plus visited-object identifiers) to the server.
pub fn submit_survey(
    ticket: &mut SmartTicket,
    response: SurveyResponse,
) -> Result<StUplink, GuidanceError> {
    if ticket.survey.is_some() {
        return Err(GuidanceError::DuplicateSurvey);
    }
    if !response.is_well_formed() {
        return Err(GuidanceError::MalformedSurvey);
    }
    ticket.survey = Some(response.clone());
    Ok(StUplink::Survey {
        ticket_id: ticket.ticket_id.clone(),
        response,
        visited: ticket.visited_objects(),
    })
}
