//! Route planning over road centerlines and scripted agents that drive a
//! session through the target sequence with each technique.

use petgraph::algo::astar;
use petgraph::graph::{NodeIndex, UnGraph};
use serde::{Deserialize, Serialize};

use super::session::{CommandRequest, ScriptEntry};
use super::steering::SteeringConfig;
use crate::world::{nearest_walkable_point, normalize_yaw, yaw_difference, TownLayout, Vec3};
use crate::Technique;

const NODE_EPS: f64 = 1e-6;

/// Yaw (degrees from +z, clockwise) of the ground direction `from -> to`.
pub fn heading_between(from: Vec3, to: Vec3) -> f64 {
    normalize_yaw((to.x - from.x).atan2(to.z - from.z).to_degrees())
}

fn segment_intersection(a: Vec3, b: Vec3, c: Vec3, d: Vec3) -> Option<Vec3> {
    let (rx, rz) = (b.x - a.x, b.z - a.z);
    let (sx, sz) = (d.x - c.x, d.z - c.z);
    let den = rx * sz - rz * sx;
    if den.abs() < 1e-12 {
        return None;
    }
    let t = ((c.x - a.x) * sz - (c.z - a.z) * sx) / den;
    let u = ((c.x - a.x) * rz - (c.z - a.z) * rx) / den;
    if (-NODE_EPS..=1.0 + NODE_EPS).contains(&t) && (-NODE_EPS..=1.0 + NODE_EPS).contains(&u) {
        Some(Vec3::new(a.x + t * rx, 0.0, a.z + t * rz))
    } else {
        None
    }
}

/// Shortest path along road centerlines between the snapped images of
/// `from` and `to`. Returns the corner points, endpoints included, with
/// collinear interior points removed. `None` if the network is disconnected.
pub fn plan_route(layout: &TownLayout, from: Vec3, to: Vec3) -> Option<Vec<Vec3>> {
    let start = nearest_walkable_point(layout, from, 0.0);
    let goal = nearest_walkable_point(layout, to, 0.0);

    let mut nodes: Vec<Vec3> = Vec::new();
    let mut add = |p: Vec3| -> usize {
        let p = p.on_ground();
        if let Some(i) = nodes.iter().position(|q| q.ground_distance(p) < NODE_EPS) {
            return i;
        }
        nodes.push(p);
        nodes.len() - 1
    };
    let s = add(start);
    let g = add(goal);
    for (i, seg) in layout.segments.iter().enumerate() {
        add(seg.a);
        add(seg.b);
        for other in &layout.segments[i + 1..] {
            if let Some(x) = segment_intersection(seg.a, seg.b, other.a, other.b) {
                add(x);
            }
        }
    }

    let mut graph: UnGraph<Vec3, f64> = UnGraph::with_capacity(nodes.len(), nodes.len() * 2);
    for &p in &nodes {
        graph.add_node(p);
    }
    for seg in &layout.segments {
        let mut on: Vec<(f64, usize)> = nodes
            .iter()
            .enumerate()
            .filter(|(_, p)| seg.distance(**p) < NODE_EPS)
            .map(|(i, p)| ((*p - seg.a.on_ground()).dot(seg.direction()), i))
            .collect();
        on.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in on.windows(2) {
            let (i, j) = (w[0].1, w[1].1);
            graph.add_edge(NodeIndex::new(i), NodeIndex::new(j), nodes[i].ground_distance(nodes[j]));
        }
    }

    let goal_ix = NodeIndex::new(g);
    let (_, path) = astar(&graph, NodeIndex::new(s), |n| n == goal_ix, |e| *e.weight(), |_| 0.0)?;
    let pts: Vec<Vec3> = path.into_iter().map(|i| graph[i]).collect();
    Some(collapse_collinear(pts))
}

fn collapse_collinear(pts: Vec<Vec3>) -> Vec<Vec3> {
    let mut out: Vec<Vec3> = Vec::with_capacity(pts.len());
    for p in pts {
        if out.len() >= 2 {
            let a = out[out.len() - 2];
            let b = out[out.len() - 1];
            let turn = yaw_difference(heading_between(a, b), heading_between(b, p));
            if turn.abs() < 1e-6 {
                out.pop();
            }
        }
        out.push(p);
    }
    out
}

/// Route legs from the start pose through every target in order.
pub fn task_route(layout: &TownLayout) -> Option<Vec<Vec<Vec3>>> {
    let mut here = layout.start_pose.position;
    let mut legs = Vec::with_capacity(layout.targets.len());
    for &t in &layout.targets {
        let leg = plan_route(layout, here, t)?;
        here = *leg.last().unwrap();
        legs.push(leg);
    }
    Some(legs)
}

pub fn route_length(route: &[Vec3]) -> f64 {
    route.windows(2).map(|w| w[0].ground_distance(w[1])).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentConfig {
    /// Longest controller hop, meters.
    pub teleport_hop: f64,
    /// Time between controller releases, seconds.
    pub teleport_interval: f64,
    /// Longest spoken move; must not exceed the resolver's max travel.
    pub llm_hop: f64,
    /// Time between free-form commands; must exceed the teleport delay.
    pub llm_interval: f64,
    /// Tick used to align steering turn times.
    pub dt: f64,
    pub steering: SteeringConfig,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            teleport_hop: 25.0,
            teleport_interval: 0.5,
            llm_hop: 50.0,
            llm_interval: 2.5,
            dt: 0.01,
            steering: SteeringConfig::default(),
        }
    }
}

/// Splits each straight run into hops of at most `max_hop`.
fn hops(legs: &[Vec<Vec3>], max_hop: f64) -> Vec<(Vec3, Vec3)> {
    let mut out = Vec::new();
    for leg in legs {
        for w in leg.windows(2) {
            let (a, b) = (w[0], w[1]);
            let len = a.ground_distance(b);
            if len < NODE_EPS {
                continue;
            }
            let n = (len / max_hop - 1e-9).ceil().max(1.0) as usize;
            let mut prev = a;
            for k in 1..=n {
                let next = if k == n { b } else { a + (b - a) * ((k as f64 * max_hop) / len) };
                out.push((prev, next));
                prev = next;
            }
        }
    }
    out
}

/// Point-and-release hops along the route.
pub fn teleport_script(layout: &TownLayout, cfg: &AgentConfig) -> Option<Vec<ScriptEntry>> {
    let legs = task_route(layout)?;
    Some(
        hops(&legs, cfg.teleport_hop)
            .into_iter()
            .enumerate()
            .map(|(i, (_, to))| ScriptEntry::new((i + 1) as f64 * cfg.teleport_interval, CommandRequest::aim(to)))
            .collect(),
    )
}

fn format_meters(d: f64) -> String {
    let r = (d * 10.0).round() / 10.0;
    if r.fract() == 0.0 {
        format!("{r:.0}")
    } else {
        format!("{r:.1}")
    }
}

/// "move N meters forward" commands, looking along each hop first.
pub fn llm_script(layout: &TownLayout, cfg: &AgentConfig) -> Option<Vec<ScriptEntry>> {
    let legs = task_route(layout)?;
    Some(
        hops(&legs, cfg.llm_hop)
            .into_iter()
            .enumerate()
            .map(|(i, (from, to))| {
                let text = format!("move {} meters forward", format_meters(from.ground_distance(to)));
                ScriptEntry::new(i as f64 * cfg.llm_interval, CommandRequest::say(text).with_yaw(heading_between(from, to)))
            })
            .collect(),
    )
}

/// Walks the route at top speed, turning at every corner.
pub fn steering_script(layout: &TownLayout, cfg: &AgentConfig) -> Option<Vec<ScriptEntry>> {
    let legs = task_route(layout)?;
    let corners: Vec<Vec3> = {
        let mut all: Vec<Vec3> = Vec::new();
        for leg in &legs {
            for &p in leg {
                if all.last().is_none_or(|q| q.ground_distance(p) > NODE_EPS) {
                    all.push(p);
                }
            }
        }
        collapse_collinear(all)
    };
    let mut script = Vec::new();
    if corners.len() < 2 {
        return Some(script);
    }
    for _ in 0..cfg.steering.max_level() {
        script.push(ScriptEntry::new(0.0, CommandRequest::say("faster")));
    }
    let speed = cfg.steering.speed_levels[cfg.steering.max_level()];
    let mut heading = heading_between(corners[0], corners[1]);
    script.push(ScriptEntry::new(0.0, CommandRequest::say("go forward").with_yaw(heading)));
    let mut walked = 0.0;
    for w in corners.windows(3) {
        walked += w[0].ground_distance(w[1]);
        let t = ((walked / speed) / cfg.dt).round() * cfg.dt;
        let next = heading_between(w[1], w[2]);
        let turn = yaw_difference(next, heading);
        let step = cfg.steering.turn_step;
        let req = if (turn - step).abs() < 1e-6 {
            CommandRequest::say("turn right")
        } else if (turn + step).abs() < 1e-6 {
            CommandRequest::say("turn left")
        } else if (turn.abs() - 180.0).abs() < 1e-6 {
            CommandRequest::say("go back")
        } else {
            CommandRequest::say("go forward").with_yaw(next)
        };
        script.push(ScriptEntry::new(t, req));
        heading = next;
    }
    Some(script)
}

/// The scripted agent for `technique`.
pub fn agent_script(layout: &TownLayout, technique: Technique, cfg: &AgentConfig) -> Option<Vec<ScriptEntry>> {
    match technique {
        Technique::Teleport => teleport_script(layout, cfg),
        Technique::Steering => steering_script(layout, cfg),
        Technique::LlmDriven => llm_script(layout, cfg),
    }
}
