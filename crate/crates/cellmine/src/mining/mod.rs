//! Frequent-pattern mining over the netlist graph.
//!
//! The miner maintains pattern groups — sets of vertex-disjoint, mutually
//! isomorphic subgraphs identified by a canonical code — under a global
//! occupancy map (each vertex belongs to at most one subgraph ever). It
//! starts from 2-level predecessor-tree seeds, then repeatedly grows the
//! highest-coverage growable group by one vertex: the most frequent common
//! neighbor attachment. Growth may steal vertices from other groups
//! (abandoning the losing subgraph), freed vertices re-seed, and groups
//! whose coverage drops below `prune_ratio · |V|` are dropped. Every
//! iteration the top-Nₚ groups are scored; mining stops after two
//! consecutive reward declines or when no group can grow.

mod encode;

pub use encode::{neighbor_attachment, tree_encode, Attachment, PatternEdge, SeedTree};

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use crate::combine::{
    reward_approx, select_combination, IterationRecord, PatternCombination, RewardHistory,
    SelectedGroup,
};
use crate::error::{Error, Result};
use crate::netlist::{NetlistGraph, VertexId};

/// Mining parameters.
#[derive(Debug, Clone)]
pub struct MiningConfig {
    /// Nₚ: maximum number of pattern groups in a combination.
    pub np: usize,
    /// Sₚ: maximum vertices per pattern subgraph.
    pub sp: usize,
    /// Groups covering less than this fraction of |V| are pruned.
    pub prune_ratio: f64,
    /// Per-merge area constant scaling the coverage reward.
    pub k: f64,
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig {
            np: 5,
            sp: 10,
            prune_ratio: 0.025,
            k: 1.0,
        }
    }
}

impl MiningConfig {
    pub fn validate(&self) -> Result<()> {
        if self.np < 1 {
            return Err(Error::Config("np must be >= 1".into()));
        }
        if self.sp < 2 {
            return Err(Error::Config("sp must be >= 2".into()));
        }
        if !(self.prune_ratio >= 0.0 && self.prune_ratio < 1.0) {
            return Err(Error::Config(format!(
                "prune_ratio must be in [0, 1), got {}",
                self.prune_ratio
            )));
        }
        if !(self.k > 0.0) {
            return Err(Error::Config(format!("K must be positive, got {}", self.k)));
        }
        Ok(())
    }
}

/// One occurrence of a pattern: vertices listed by in-pattern index.
#[derive(Debug, Clone)]
pub struct PatternSubgraph {
    pub group: usize,
    pub vertices: Vec<VertexId>,
    /// Accumulated pattern edges (seed edges plus attachment edges).
    pub edges: Vec<PatternEdge>,
    pub abandoned: bool,
}

/// A set of disjoint isomorphic subgraphs sharing one canonical code.
#[derive(Debug, Clone)]
pub struct PatternGroup {
    pub code: String,
    pub size: usize,
    /// Live member subgraph ids, in creation order.
    pub members: Vec<usize>,
    /// No longer growable (at size Sₚ or without neighbors).
    pub mature: bool,
    /// Pruned or emptied; kept in the arena for id stability.
    pub dead: bool,
}

impl PatternGroup {
    pub fn coverage(&self) -> usize {
        self.members.len() * self.size
    }
}

/// Neighbor survey of one group: attachment code → (neighbor, owner
/// subgraph id) in first-visit order.
#[derive(Debug)]
pub struct Survey {
    pub by_code: BTreeMap<String, Vec<(VertexId, usize)>>,
    /// Adjacency-list entries scanned; stays O(|E|) per call.
    pub edge_touches: usize,
}

impl Survey {
    pub fn is_empty(&self) -> bool {
        self.by_code.is_empty()
    }

    /// The most frequent attachment code; ties go to the smallest code text.
    pub fn winner(&self) -> Option<(&str, &[(VertexId, usize)])> {
        let mut best: Option<(&String, &Vec<(VertexId, usize)>)> = None;
        for (code, list) in &self.by_code {
            if best.map_or(true, |(_, b)| list.len() > b.len()) {
                best = Some((code, list));
            }
        }
        best.map(|(c, l)| (c.as_str(), l.as_slice()))
    }
}

/// What one growth step did, for monotonicity and termination analysis.
#[derive(Debug, Clone)]
pub struct GrowthRecord {
    pub iteration: usize,
    pub tgt_code: String,
    pub winner_code: String,
    /// |PGS_tgt| before growth; recurrence-frequency monotonicity bounds
    /// new_count by it (a grown pattern cannot occur more often than the
    /// pattern it extends).
    pub tgt_before: usize,
    pub new_count: usize,
    /// Vertex visits spent in this call; stays O(|V|) per call.
    pub vertex_touches: usize,
}

/// Complete result of a mining run.
#[derive(Debug)]
pub struct MiningOutcome {
    /// Highest-reward combination seen across all iterations.
    pub best: PatternCombination,
    pub history: RewardHistory,
    pub growth_log: Vec<GrowthRecord>,
    /// Number of growth iterations executed.
    pub iterations: usize,
    /// Wall-clock seconds spent in the mining loop.
    pub fsm_seconds: f64,
}

/// Run the full mining loop. Deterministic for identical inputs.
pub fn mine(graph: &NetlistGraph, cfg: &MiningConfig) -> Result<MiningOutcome> {
    let start = Instant::now();
    let mut miner = Miner::new(graph, cfg.clone())?;
    miner.seed_initial();
    // Livelock guard only; honest runs stop via rewards or maturity far
    // earlier. Never observed to trigger.
    let iter_cap = cfg.sp * 10 + 100;
    while miner.iterations < iter_cap {
        let Some(tgt) = miner.pick_target() else { break };
        let survey = miner.enumerate_neighbors(tgt);
        if survey.is_empty() {
            miner.mark_mature(tgt);
            continue;
        }
        miner.grow(tgt, &survey);
        miner.record_eval();
        #[cfg(debug_assertions)]
        miner.check_invariants().expect("mining invariants");
        if miner.history().should_terminate() {
            break;
        }
    }
    Ok(miner.finish(start))
}

/// Mining state with a stepwise API (seed → pick → survey → grow), so tests
/// and examples can drive and inspect single steps; `mine` wraps the loop.
pub struct Miner<'g> {
    graph: &'g NetlistGraph,
    cfg: MiningConfig,
    /// vertex → (group id, subgraph id); None = FREE.
    occupancy: Vec<Option<(u32, u32)>>,
    subgraphs: Vec<PatternSubgraph>,
    groups: Vec<PatternGroup>,
    /// Live non-empty group ids, coverage-descending (ties: code ascending).
    list: Vec<usize>,
    history: RewardHistory,
    growth_log: Vec<GrowthRecord>,
    iterations: usize,
    /// Codes of groups that died (pruned or emptied). A supplement-created
    /// group with a retired code is born mature: re-growing it would replay
    /// the exact growth that already failed, looping the prune → free →
    /// re-seed cycle forever. Born-mature groups still count toward
    /// coverage, appear in combinations, and can be raided.
    retired: BTreeSet<String>,
}

impl<'g> Miner<'g> {
    pub fn new(graph: &'g NetlistGraph, cfg: MiningConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Miner {
            graph,
            cfg,
            occupancy: vec![None; graph.n_vertices()],
            subgraphs: Vec::new(),
            groups: Vec::new(),
            list: Vec::new(),
            history: RewardHistory::default(),
            growth_log: Vec::new(),
            iterations: 0,
            retired: BTreeSet::new(),
        })
    }

    pub fn history(&self) -> &RewardHistory {
        &self.history
    }

    pub fn growth_log(&self) -> &[GrowthRecord] {
        &self.growth_log
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn occupancy(&self) -> &[Option<(u32, u32)>] {
        &self.occupancy
    }

    /// (code, size, member count) per live group, in list order.
    pub fn group_summaries(&self) -> Vec<(String, usize, usize)> {
        self.list
            .iter()
            .map(|&gid| {
                let g = &self.groups[gid];
                (g.code.clone(), g.size, g.members.len())
            })
            .collect()
    }

    /// Identify the initial seed groups. The seeding state itself is not a
    /// reward-history entry: it precedes any pruning, so its coverage is
    /// inflated by fragment groups that can never survive, and selecting it
    /// would favor trivial two-gate decompositions over grown patterns.
    /// Rewards are evaluated after each growth iteration only.
    pub fn seed_initial(&mut self) {
        self.seed_free_vertices();
        self.rebuild_list();
    }

    /// Group all free-rooted, all-free 2-level trees by code, then claim
    /// them group-by-group in descending frequency (ties: ascending code),
    /// skipping trees that lost a vertex to an earlier claim. Single-vertex
    /// trees are discarded and their roots stay free.
    ///
    /// Serves both initial seeding and post-growth seed supplement; occupied
    /// vertices simply make their trees ineligible. Returns vertex visits.
    fn seed_free_vertices(&mut self) -> usize {
        let mut touches = 0usize;
        let mut by_code: BTreeMap<String, Vec<SeedTree>> = BTreeMap::new();
        for root in 0..self.graph.n_vertices() as VertexId {
            touches += 1;
            if self.occupancy[root as usize].is_some() {
                continue;
            }
            let tree = tree_encode(self.graph, root);
            touches += tree.vertices.len() - 1;
            if tree.vertices.len() < 2 {
                continue;
            }
            if tree.vertices[1..]
                .iter()
                .any(|&v| self.occupancy[v as usize].is_some())
            {
                continue;
            }
            by_code.entry(tree.code.clone()).or_default().push(tree);
        }
        // Stable sort on a code-ascending base: equal frequencies keep
        // ascending code order.
        let mut grouped: Vec<(String, Vec<SeedTree>)> = by_code.into_iter().collect();
        grouped.sort_by(|a, b| b.1.len().cmp(&a.1.len()));
        for (code, trees) in grouped {
            let gid = self.groups.len();
            let mut members = Vec::new();
            let mut size = 0;
            for tree in trees {
                if tree
                    .vertices
                    .iter()
                    .any(|&v| self.occupancy[v as usize].is_some())
                {
                    continue; // lost a vertex to an earlier claim
                }
                let sid = self.subgraphs.len();
                for &v in &tree.vertices {
                    self.occupancy[v as usize] = Some((gid as u32, sid as u32));
                }
                size = tree.vertices.len();
                self.subgraphs.push(PatternSubgraph {
                    group: gid,
                    vertices: tree.vertices,
                    edges: tree.edges,
                    abandoned: false,
                });
                members.push(sid);
            }
            if members.is_empty() {
                continue;
            }
            let mature = self.retired.contains(&code);
            self.groups.push(PatternGroup {
                code,
                size,
                members,
                mature,
                dead: false,
            });
        }
        touches
    }

    /// Next growth target: the highest-coverage live group that is not
    /// mature and below the size limit. Groups found at the limit are
    /// marked mature along the way.
    pub fn pick_target(&mut self) -> Option<usize> {
        for i in 0..self.list.len() {
            let gid = self.list[i];
            if self.groups[gid].mature {
                continue;
            }
            if self.groups[gid].size >= self.cfg.sp {
                self.groups[gid].mature = true;
                continue;
            }
            return Some(gid);
        }
        None
    }

    pub fn mark_mature(&mut self, gid: usize) {
        self.groups[gid].mature = true;
    }

    /// Survey all 1-hop neighbors of `tgt`'s subgraphs. Each neighbor is
    /// encoded once, on first visit, owned by the visiting subgraph;
    /// vertices of tgt's own other subgraphs are skipped (absorbing them
    /// would overlap two members of one group).
    pub fn enumerate_neighbors(&self, tgt: usize) -> Survey {
        let mut by_code: BTreeMap<String, Vec<(VertexId, usize)>> = BTreeMap::new();
        let mut visited = vec![false; self.graph.n_vertices()];
        let mut edge_touches = 0usize;
        for &sid in &self.groups[tgt].members {
            let sub = &self.subgraphs[sid];
            for &v in &sub.vertices {
                let adjacency = self.graph.in_edges[v as usize]
                    .iter()
                    .chain(self.graph.out_edges[v as usize].iter());
                for &eid in adjacency {
                    edge_touches += 1;
                    let e = &self.graph.edges[eid as usize];
                    let other = if e.sink == v { e.driver } else { e.sink };
                    if visited[other as usize] || sub.vertices.contains(&other) {
                        continue;
                    }
                    visited[other as usize] = true;
                    if let Some((g, _)) = self.occupancy[other as usize] {
                        if g as usize == tgt {
                            continue;
                        }
                    }
                    let att = neighbor_attachment(self.graph, other, &sub.vertices);
                    edge_touches += self.graph.degree(other);
                    by_code.entry(att.code).or_default().push((other, sid));
                }
            }
        }
        Survey { by_code, edge_touches }
    }

    /// Grow `tgt` by its winning neighbor code: each winning neighbor whose
    /// owner subgraph is still live extends that owner into a new group
    /// (stealing the neighbor from another group's subgraph if needed), then
    /// freed vertices re-seed, low-coverage groups are pruned, and the list
    /// is re-sorted.
    pub fn grow(&mut self, tgt: usize, survey: &Survey) -> &GrowthRecord {
        let (winner_code, candidates) = survey.winner().expect("grow needs a non-empty survey");
        assert!(self.groups[tgt].size < self.cfg.sp, "target already at size limit");
        let tgt_before = self.groups[tgt].members.len();
        self.iterations += 1;
        let mut vertex_touches = 0usize;
        let new_gid = self.groups.len();
        let mut new_members: Vec<usize> = Vec::new();

        for &(nbr, owner_sid) in candidates {
            if self.subgraphs[owner_sid].abandoned {
                continue; // its extension already consumed this owner
            }
            if let Some((g, s)) = self.occupancy[nbr as usize] {
                // The survey excluded tgt-owned vertices, and this loop never
                // re-offers a vertex it already placed, so the occupant must
                // be some other group's subgraph: steal the vertex.
                if g as usize == tgt || g as usize == new_gid {
                    debug_assert!(false, "unexpected occupant {g} for neighbor {nbr}");
                    continue;
                }
                vertex_touches += self.abandon_and_free(s as usize);
            }
            let owner = &self.subgraphs[owner_sid];
            let att = neighbor_attachment(self.graph, nbr, &owner.vertices);
            debug_assert_eq!(att.code, winner_code, "stale survey");
            let mut vertices = owner.vertices.clone();
            vertices.push(nbr);
            let mut edges = owner.edges.clone();
            edges.extend(att.edges);
            vertex_touches += vertices.len();
            let new_sid = self.subgraphs.len();
            for &v in &vertices {
                self.occupancy[v as usize] = Some((new_gid as u32, new_sid as u32));
            }
            self.subgraphs[owner_sid].abandoned = true;
            self.subgraphs.push(PatternSubgraph {
                group: new_gid,
                vertices,
                edges,
                abandoned: false,
            });
            new_members.push(new_sid);
        }

        let subgraphs = &self.subgraphs;
        let members = &mut self.groups[tgt].members;
        let before_retain = members.len();
        members.retain(|&sid| !subgraphs[sid].abandoned);
        debug_assert_eq!(before_retain - self.groups[tgt].members.len(), new_members.len());

        let new_count = new_members.len();
        if !new_members.is_empty() {
            let code = format!("{}|{winner_code}", self.groups[tgt].code);
            let size = self.groups[tgt].size + 1;
            self.groups.push(PatternGroup {
                code,
                size,
                members: new_members,
                mature: false,
                dead: false,
            });
        }

        vertex_touches += self.seed_free_vertices();
        vertex_touches += self.prune();
        self.rebuild_list();

        self.growth_log.push(GrowthRecord {
            iteration: self.iterations,
            tgt_code: self.groups[tgt].code.clone(),
            winner_code: winner_code.to_string(),
            tgt_before,
            new_count,
            vertex_touches,
        });
        self.growth_log.last().unwrap()
    }

    /// Abandon a subgraph and free all its vertices. Returns vertices freed.
    fn abandon_and_free(&mut self, sid: usize) -> usize {
        let sub = &mut self.subgraphs[sid];
        sub.abandoned = true;
        let gid = sub.group;
        let vertices = std::mem::take(&mut sub.vertices);
        for &v in &vertices {
            debug_assert_eq!(self.occupancy[v as usize], Some((gid as u32, sid as u32)));
            self.occupancy[v as usize] = None;
        }
        let n = vertices.len();
        self.subgraphs[sid].vertices = vertices;
        self.groups[gid].members.retain(|&m| m != sid);
        n
    }

    /// Drop groups below the coverage floor (and emptied groups), freeing
    /// their vertices. Returns vertices freed.
    fn prune(&mut self) -> usize {
        let floor = self.cfg.prune_ratio * self.graph.n_vertices() as f64;
        let mut touches = 0usize;
        for gid in 0..self.groups.len() {
            if self.groups[gid].dead {
                continue;
            }
            let g = &self.groups[gid];
            if !g.members.is_empty() && (g.coverage() as f64) >= floor {
                continue;
            }
            let members = std::mem::take(&mut self.groups[gid].members);
            for sid in members {
                self.subgraphs[sid].abandoned = true;
                for i in 0..self.subgraphs[sid].vertices.len() {
                    let v = self.subgraphs[sid].vertices[i];
                    self.occupancy[v as usize] = None;
                    touches += 1;
                }
            }
            self.groups[gid].dead = true;
            let code = self.groups[gid].code.clone();
            self.retired.insert(code);
        }
        touches
    }

    fn rebuild_list(&mut self) {
        self.list = (0..self.groups.len())
            .filter(|&g| !self.groups[g].dead && !self.groups[g].members.is_empty())
            .collect();
        self.list.sort_by(|&a, &b| {
            let (ga, gb) = (&self.groups[a], &self.groups[b]);
            gb.coverage()
                .cmp(&ga.coverage())
                .then_with(|| ga.code.cmp(&gb.code))
        });
    }

    /// Freeze a live group into a value snapshot.
    fn snapshot_group(&self, gid: usize) -> SelectedGroup {
        let g = &self.groups[gid];
        let first = &self.subgraphs[g.members[0]];
        SelectedGroup {
            code: g.code.clone(),
            cells: first
                .vertices
                .iter()
                .map(|&v| self.graph.cell(v).to_string())
                .collect(),
            edges: first.edges.clone(),
            members: g
                .members
                .iter()
                .map(|&sid| self.subgraphs[sid].vertices.clone())
                .collect(),
        }
    }

    /// The current top-Nₚ combination.
    pub fn selection(&self) -> PatternCombination {
        let groups = self
            .list
            .iter()
            .take(self.cfg.np)
            .map(|&gid| self.snapshot_group(gid))
            .collect();
        select_combination(groups, self.cfg.np)
    }

    /// Score and record the current state as one history entry.
    pub fn record_eval(&mut self) {
        let combination = self.selection();
        let reward = reward_approx(&combination, self.cfg.k);
        self.history.push(IterationRecord {
            iteration: self.iterations,
            combination,
            reward_approx: reward,
        });
    }

    fn finish(self, start: Instant) -> MiningOutcome {
        // A design whose seed groups are all mature from the start (no
        // neighbors anywhere) never grows, leaving no history; the seeded
        // selection is the result then.
        let best = self
            .history
            .best()
            .map(|r| r.combination.clone())
            .unwrap_or_else(|| self.selection());
        MiningOutcome {
            best,
            history: self.history,
            growth_log: self.growth_log,
            iterations: self.iterations,
            fsm_seconds: start.elapsed().as_secs_f64(),
        }
    }

    /// Verify the full state consistency: occupancy matches live memberships
    /// exactly, subgraphs are connected and within the size limit, and the
    /// list is complete and correctly sorted. Test and debug builds call
    /// this after every mining step.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let mut expected: Vec<Option<(u32, u32)>> = vec![None; self.graph.n_vertices()];
        for (gid, g) in self.groups.iter().enumerate() {
            if g.dead {
                if !g.members.is_empty() {
                    return Err(format!("dead group {gid} still has members"));
                }
                continue;
            }
            for &sid in &g.members {
                let sub = &self.subgraphs[sid];
                if sub.abandoned {
                    return Err(format!("group {gid} lists abandoned subgraph {sid}"));
                }
                if sub.group != gid {
                    return Err(format!("subgraph {sid} group id mismatch"));
                }
                if sub.vertices.len() != g.size {
                    return Err(format!("subgraph {sid} size != group size"));
                }
                if g.size > self.cfg.sp {
                    return Err(format!("group {gid} exceeds size limit"));
                }
                for &v in &sub.vertices {
                    if expected[v as usize].is_some() {
                        return Err(format!("vertex {v} owned twice"));
                    }
                    expected[v as usize] = Some((gid as u32, sid as u32));
                }
                if !connected(sub) {
                    return Err(format!("subgraph {sid} is not connected"));
                }
            }
        }
        if expected != self.occupancy {
            return Err("occupancy map out of sync with memberships".into());
        }
        for pair in self.list.windows(2) {
            let (ga, gb) = (&self.groups[pair[0]], &self.groups[pair[1]]);
            let ord = gb
                .coverage()
                .cmp(&ga.coverage())
                .then_with(|| ga.code.cmp(&gb.code));
            if ord == std::cmp::Ordering::Greater {
                return Err("pattern list not sorted".into());
            }
        }
        let live = (0..self.groups.len())
            .filter(|&g| !self.groups[g].dead && !self.groups[g].members.is_empty())
            .count();
        if live != self.list.len() {
            return Err("pattern list misses live groups".into());
        }
        Ok(())
    }
}

/// Union-find connectivity over a subgraph's accumulated edges.
pub(crate) fn connected(sub: &PatternSubgraph) -> bool {
    let n = sub.vertices.len();
    if n <= 1 {
        return true;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let root = find(parent, parent[x]);
            parent[x] = root;
        }
        parent[x]
    }
    for e in &sub.edges {
        let (a, b) = (find(&mut parent, e.from as usize), find(&mut parent, e.to as usize));
        parent[a] = b;
    }
    let root = find(&mut parent, 0);
    (1..n).all(|i| find(&mut parent, i) == root)
}
