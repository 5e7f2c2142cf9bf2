//! Trivalent train tracks as ribbon graphs.
//!
//! A switch has three slots. Going counterclockwise around a switch (for the
//! orientation of the surface) the slots are met in the order trunk, right,
//! left; "left" and "right" are as seen from the trunk looking toward the
//! branch pair. Each slot holds one end of an edge, and every edge has ends
//! `0` and `1`.
//!
//! Boundary walks of the ribbon graph follow the permutation
//! `h -> rotate(other_end(h))` on edge-ends, so a walk arriving at a switch
//! through slot `X` continues through the next slot counterclockwise. The
//! corner swept between the right and left slots is the cusp of the switch.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Trunk,
    Right,
    Left,
}

impl Slot {
    /// Counterclockwise order around a switch.
    pub const CCW: [Slot; 3] = [Slot::Trunk, Slot::Right, Slot::Left];

    pub fn index(self) -> usize {
        match self {
            Slot::Trunk => 0,
            Slot::Right => 1,
            Slot::Left => 2,
        }
    }

    pub fn is_branch(self) -> bool {
        self != Slot::Trunk
    }

    fn next_ccw(self) -> Slot {
        Slot::CCW[(self.index() + 1) % 3]
    }

    pub fn name(self) -> &'static str {
        match self {
            Slot::Trunk => "trunk",
            Slot::Right => "right",
            Slot::Left => "left",
        }
    }
}

/// One end of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeEnd {
    pub edge: usize,
    pub end: usize,
}

impl EdgeEnd {
    pub fn new(edge: usize, end: usize) -> Self {
        EdgeEnd { edge, end }
    }

    fn key(self) -> usize {
        2 * self.edge + self.end
    }
}

/// Side of the canonically oriented tie on which the branch pair lies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Divergence {
    Left,
    Right,
}

impl Divergence {
    pub fn flip(self) -> Self {
        match self {
            Divergence::Left => Divergence::Right,
            Divergence::Right => Divergence::Left,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn to_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Switch {
    pub id: String,
    pub trunk: EdgeEnd,
    pub right: EdgeEnd,
    pub left: EdgeEnd,
}

impl Switch {
    pub fn slot(&self, slot: Slot) -> EdgeEnd {
        match slot {
            Slot::Trunk => self.trunk,
            Slot::Right => self.right,
            Slot::Left => self.left,
        }
    }

    pub fn slots(&self) -> [(Slot, EdgeEnd); 3] {
        Slot::CCW.map(|s| (s, self.slot(s)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TrackError {
    #[error("invalid track: {0}")]
    Invalid(ValidationReport),
    #[error("malformed track: {0}")]
    Structure(String),
    #[error("track is already oriented")]
    AlreadyOriented,
}

/// Switches and edges without any orientation data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackGraph {
    switches: Vec<Switch>,
    edge_ids: Vec<String>,
}

impl TrackGraph {
    /// Checks only that references are in range and ids are unique; the
    /// combinatorial axioms are left to [`validate_track`].
    pub fn new(switches: Vec<Switch>, edge_ids: Vec<String>) -> Result<Self, TrackError> {
        let mut seen = HashMap::new();
        for id in &edge_ids {
            if seen.insert(id.as_str(), ()).is_some() {
                return Err(TrackError::Structure(format!("duplicate edge id {id:?}")));
            }
        }
        let mut seen = HashMap::new();
        for s in &switches {
            if seen.insert(s.id.as_str(), ()).is_some() {
                return Err(TrackError::Structure(format!(
                    "duplicate switch id {:?}",
                    s.id
                )));
            }
            for (slot, end) in s.slots() {
                if end.edge >= edge_ids.len() || end.end > 1 {
                    return Err(TrackError::Structure(format!(
                        "switch {:?} {} slot references a missing edge-end",
                        s.id,
                        slot.name()
                    )));
                }
            }
        }
        Ok(TrackGraph { switches, edge_ids })
    }

    pub fn switches(&self) -> &[Switch] {
        &self.switches
    }

    pub fn edge_ids(&self) -> &[String] {
        &self.edge_ids
    }

    pub fn num_switches(&self) -> usize {
        self.switches.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edge_ids.iter().position(|e| e == id)
    }

    pub fn switch_index(&self, id: &str) -> Option<usize> {
        self.switches.iter().position(|s| s.id == id)
    }

    /// Every slot occupied by each edge-end, indexed by `2 * edge + end`.
    fn occupancy(&self) -> Vec<Vec<(usize, Slot)>> {
        let mut occ = vec![Vec::new(); 2 * self.num_edges()];
        for (i, s) in self.switches.iter().enumerate() {
            for (slot, end) in s.slots() {
                occ[end.key()].push((i, slot));
            }
        }
        occ
    }

    fn check_slots(&self, out: &mut Vec<Violation>) {
        if self.switches.is_empty() && self.edge_ids.is_empty() {
            out.push(Violation::Empty);
            return;
        }
        let slots = 3 * self.num_switches();
        let ends = 2 * self.num_edges();
        if slots != ends {
            out.push(Violation::NotTrivalent {
                edge_ends: ends,
                slots,
            });
        }
        for (key, occ) in self.occupancy().iter().enumerate() {
            let edge = self.edge_ids[key / 2].clone();
            match occ.len() {
                0 => out.push(Violation::UnusedEnd { edge, end: key % 2 }),
                1 => {}
                n => out.push(Violation::SlotReuse {
                    edge,
                    end: key % 2,
                    slots: n,
                }),
            }
        }
    }

    /// Component label of each switch, joining switches through shared edges.
    pub fn components(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.num_switches());
        let mut first_at = vec![None; self.num_edges()];
        for (i, s) in self.switches.iter().enumerate() {
            for (_, end) in s.slots() {
                match first_at[end.edge] {
                    None => first_at[end.edge] = Some(i),
                    Some(j) => uf.union(i, j),
                }
            }
        }
        uf.labels()
    }

    pub fn num_components(&self) -> usize {
        count_labels(&self.components())
    }

    /// Location of each edge-end; requires a valid slot bijection.
    pub(crate) fn locations(&self) -> Vec<(usize, Slot)> {
        self.occupancy()
            .into_iter()
            .map(|occ| *occ.first().expect("edge-end without a slot"))
            .collect()
    }

    pub(crate) fn half_edges(&self) -> HalfEdges<'_> {
        HalfEdges {
            graph: self,
            location: self.locations(),
        }
    }
}

/// Edge-end bookkeeping for a graph whose slots form a bijection.
pub(crate) struct HalfEdges<'a> {
    graph: &'a TrackGraph,
    location: Vec<(usize, Slot)>,
}

impl HalfEdges<'_> {
    pub fn at(&self, end: EdgeEnd) -> (usize, Slot) {
        self.location[end.key()]
    }

    pub fn other_end(&self, end: EdgeEnd) -> EdgeEnd {
        EdgeEnd::new(end.edge, 1 - end.end)
    }

    /// Edge-end in the next slot counterclockwise at the same switch.
    pub fn rotate(&self, end: EdgeEnd) -> EdgeEnd {
        let (s, slot) = self.at(end);
        self.graph.switches[s].slot(slot.next_ccw())
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }

    fn labels(&mut self) -> Vec<usize> {
        let mut names = HashMap::new();
        (0..self.0.len())
            .map(|i| {
                let r = self.find(i);
                let next = names.len();
                *names.entry(r).or_insert(next)
            })
            .collect()
    }
}

fn count_labels(labels: &[usize]) -> usize {
    labels.iter().max().map_or(0, |m| m + 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Empty,
    NotTrivalent {
        edge_ends: usize,
        slots: usize,
    },
    SlotReuse {
        edge: String,
        end: usize,
        slots: usize,
    },
    UnusedEnd {
        edge: String,
        end: usize,
    },
    Disconnected {
        components: usize,
    },
    Involution(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "empty track"),
            Violation::NotTrivalent { edge_ends, slots } => {
                write!(
                    f,
                    "not trivalent: {edge_ends} edge-ends but {slots} switch slots"
                )
            }
            Violation::SlotReuse { edge, end, slots } => {
                write!(
                    f,
                    "slot reuse: end {end} of edge {edge} occupies {slots} slots"
                )
            }
            Violation::UnusedEnd { edge, end } => {
                write!(f, "end {end} of edge {edge} is not attached to any switch")
            }
            Violation::Disconnected { components } => {
                write!(f, "not connected: {components} components")
            }
            Violation::Involution(msg) => write!(f, "involution: {msg}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn messages(&self) -> Vec<String> {
        self.violations.iter().map(ToString::to_string).collect()
    }

    fn into_result(self) -> Result<(), TrackError> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(TrackError::Invalid(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        write!(f, "{}", self.messages().join("; "))
    }
}

/// Common interface of base and oriented tracks.
pub trait Track {
    fn graph(&self) -> &TrackGraph;

    fn validate(&self) -> ValidationReport;

    fn ensure_valid(&self) -> Result<(), TrackError> {
        self.validate().into_result()
    }
}

pub fn validate_track<T: Track + ?Sized>(t: &T) -> ValidationReport {
    t.validate()
}

/// A track with per-edge tie transport signs, as drawn on the surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseTrack {
    graph: TrackGraph,
    tie_transport: Vec<Sign>,
}

impl BaseTrack {
    pub fn new(graph: TrackGraph, tie_transport: Vec<Sign>) -> Result<Self, TrackError> {
        if tie_transport.len() != graph.num_edges() {
            return Err(TrackError::Structure(format!(
                "{} tie transport signs for {} edges",
                tie_transport.len(),
                graph.num_edges()
            )));
        }
        Ok(BaseTrack {
            graph,
            tie_transport,
        })
    }

    /// All transport signs `+1`.
    pub fn untwisted(graph: TrackGraph) -> Self {
        let n = graph.num_edges();
        BaseTrack {
            graph,
            tie_transport: vec![Sign::Plus; n],
        }
    }

    pub fn tie_transport(&self) -> &[Sign] {
        &self.tie_transport
    }

    /// The same track with the tie reference flipped at one switch.
    pub fn regauged(&self, switch: usize) -> Self {
        let mut tie_transport = self.tie_transport.clone();
        // A loop edge at the switch is flipped twice, hence unchanged.
        for (_, end) in self.graph.switches[switch].slots() {
            tie_transport[end.edge] = tie_transport[end.edge].flip();
        }
        BaseTrack {
            graph: self.graph.clone(),
            tie_transport,
        }
    }
}

impl Track for BaseTrack {
    fn graph(&self) -> &TrackGraph {
        &self.graph
    }

    fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        self.graph.check_slots(&mut violations);
        if violations.is_empty() {
            let c = self.graph.num_components();
            if c > 1 {
                violations.push(Violation::Disconnected { components: c });
            }
        }
        ValidationReport { violations }
    }
}

/// Deck involution of an orientation cover, on switches and on edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Involution {
    pub switches: Vec<usize>,
    pub edges: Vec<usize>,
}

/// A track whose ties are coherently oriented, so every switch is left- or
/// right-diverging.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedTrack {
    graph: TrackGraph,
    divergence: Vec<Divergence>,
    involution: Option<Involution>,
}

impl OrientedTrack {
    pub fn new(
        graph: TrackGraph,
        divergence: Vec<Divergence>,
        involution: Option<Involution>,
    ) -> Result<Self, TrackError> {
        if divergence.len() != graph.num_switches() {
            return Err(TrackError::Structure(format!(
                "{} divergence flags for {} switches",
                divergence.len(),
                graph.num_switches()
            )));
        }
        if let Some(inv) = &involution {
            let in_range = inv.switches.len() == graph.num_switches()
                && inv.edges.len() == graph.num_edges()
                && inv.switches.iter().all(|&s| s < graph.num_switches())
                && inv.edges.iter().all(|&e| e < graph.num_edges());
            if !in_range {
                return Err(TrackError::Structure(
                    "involution does not cover every switch and edge".into(),
                ));
            }
        }
        Ok(OrientedTrack {
            graph,
            divergence,
            involution,
        })
    }

    pub fn divergence(&self) -> &[Divergence] {
        &self.divergence
    }

    pub fn involution(&self) -> Option<&Involution> {
        self.involution.as_ref()
    }

    fn check_involution(&self, inv: &Involution, out: &mut Vec<Violation>) {
        let mut push = |msg: String| out.push(Violation::Involution(msg));
        let g = &self.graph;
        for (what, map) in [("switch", &inv.switches), ("edge", &inv.edges)] {
            for (i, &j) in map.iter().enumerate() {
                if i == j {
                    push(format!("fixes {what} {i}"));
                }
                if map[j] != i {
                    push(format!("is not self-inverse on {what} {i}"));
                }
            }
        }
        // How each edge's ends are carried, fixed by the first slot seen.
        let mut end_map: Vec<Option<bool>> = vec![None; g.num_edges()];
        for (s, sw) in g.switches.iter().enumerate() {
            let image = &g.switches[inv.switches[s]];
            if self.divergence[s] == self.divergence[inv.switches[s]] {
                push(format!("does not flip the divergence of switch {}", sw.id));
            }
            for (slot, end) in sw.slots() {
                let target = image.slot(slot);
                if target.edge != inv.edges[end.edge] {
                    push(format!(
                        "{} slot of switch {} is not carried to the {} slot of {}",
                        slot.name(),
                        sw.id,
                        slot.name(),
                        image.id
                    ));
                    continue;
                }
                let swapped = target.end != end.end;
                match end_map[end.edge] {
                    None => end_map[end.edge] = Some(swapped),
                    Some(prev) if prev != swapped => {
                        push(format!("tears edge {} apart", g.edge_ids[end.edge]))
                    }
                    Some(_) => {}
                }
            }
        }
    }
}

impl Track for OrientedTrack {
    fn graph(&self) -> &TrackGraph {
        &self.graph
    }

    fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        self.graph.check_slots(&mut violations);
        if !violations.is_empty() {
            return ValidationReport { violations };
        }
        let mut labels = self.graph.components();
        if let Some(inv) = &self.involution {
            self.check_involution(inv, &mut violations);
            // Connected up to the deck involution.
            let mut uf = UnionFind::new(count_labels(&labels));
            for (s, &t) in inv.switches.iter().enumerate() {
                uf.union(labels[s], labels[t]);
            }
            labels = labels.iter().map(|&l| uf.find(l)).collect();
            let mut distinct = labels.clone();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() > 1 {
                violations.push(Violation::Disconnected {
                    components: distinct.len(),
                });
            }
        } else if count_labels(&labels) > 1 {
            violations.push(Violation::Disconnected {
                components: count_labels(&labels),
            });
        }
        ValidationReport { violations }
    }
}

/// Transport signs forced by the ribbon structure when each switch's tie is
/// oriented with the branch pair on its left: `+1` on edges joining a trunk
/// slot to a branch slot, `-1` on trunk-trunk and branch-branch edges.
pub fn coherent_tie_transport(graph: &TrackGraph) -> Result<Vec<Sign>, TrackError> {
    let mut report = Vec::new();
    graph.check_slots(&mut report);
    ValidationReport { violations: report }.into_result()?;
    let he = graph.half_edges();
    Ok((0..graph.num_edges())
        .map(|e| {
            let (_, s0) = he.at(EdgeEnd::new(e, 0));
            let (_, s1) = he.at(EdgeEnd::new(e, 1));
            if s0.is_branch() != s1.is_branch() {
                Sign::Plus
            } else {
                Sign::Minus
            }
        })
        .collect())
}

/// True iff the transport signs are a coboundary, i.e. the product of signs
/// around every cycle is `+1`.
pub fn is_orientable(b: &BaseTrack) -> Result<bool, TrackError> {
    b.ensure_valid()?;
    let g = b.graph();
    let he = g.half_edges();
    let mut adjacent: Vec<Vec<(usize, Sign)>> = vec![Vec::new(); g.num_switches()];
    for e in 0..g.num_edges() {
        let (s0, _) = he.at(EdgeEnd::new(e, 0));
        let (s1, _) = he.at(EdgeEnd::new(e, 1));
        adjacent[s0].push((s1, b.tie_transport[e]));
        adjacent[s1].push((s0, b.tie_transport[e]));
    }
    let mut gauge: Vec<Option<Sign>> = vec![None; g.num_switches()];
    for root in 0..g.num_switches() {
        if gauge[root].is_some() {
            continue;
        }
        gauge[root] = Some(Sign::Plus);
        let mut queue = VecDeque::from([root]);
        while let Some(s) = queue.pop_front() {
            let gs = gauge[s].expect("visited");
            for &(t, sign) in &adjacent[s] {
                let want = gs.times(sign);
                match gauge[t] {
                    None => {
                        gauge[t] = Some(want);
                        queue.push_back(t);
                    }
                    Some(have) if have != want => return Ok(false),
                    Some(_) => {}
                }
            }
        }
    }
    Ok(true)
}

fn sheet_index(i: usize, sheet: Sign) -> usize {
    2 * i + usize::from(sheet == Sign::Minus)
}

fn sheet_suffix(sheet: Sign) -> char {
    match sheet {
        Sign::Plus => '+',
        Sign::Minus => '-',
    }
}

/// The 2-fold cover on which ties are coherently oriented.
///
/// Switch `(s, o)` carries the tie of `s` with orientation `o` relative to the
/// reference one; `(s, +)` is left-diverging and `(s, -)` right-diverging.
/// The lift of edge `e` named by sheet `o` starts at `(s0, o)` and ends at
/// `(s1, o * transport(e))`. Lifts keep the slot roles of the base, since the
/// cover inherits the surface orientation. Ids get a `+` or `-` suffix.
pub fn orientation_cover(b: &BaseTrack) -> Result<OrientedTrack, TrackError> {
    b.ensure_valid()?;
    let g = b.graph();
    let sheets = [Sign::Plus, Sign::Minus];
    let mut edge_ids = Vec::with_capacity(2 * g.num_edges());
    for id in g.edge_ids() {
        for sheet in sheets {
            edge_ids.push(format!("{id}{}", sheet_suffix(sheet)));
        }
    }
    let lift_end = |end: EdgeEnd, sheet: Sign| {
        // End 1 of the lift named by sheet o sits on sheet o * transport.
        let named = match end.end {
            0 => sheet,
            _ => sheet.times(b.tie_transport[end.edge]),
        };
        EdgeEnd::new(sheet_index(end.edge, named), end.end)
    };
    let mut switches = Vec::with_capacity(2 * g.num_switches());
    let mut divergence = Vec::with_capacity(2 * g.num_switches());
    for sw in g.switches() {
        for sheet in sheets {
            switches.push(Switch {
                id: format!("{}{}", sw.id, sheet_suffix(sheet)),
                trunk: lift_end(sw.trunk, sheet),
                right: lift_end(sw.right, sheet),
                left: lift_end(sw.left, sheet),
            });
            divergence.push(match sheet {
                Sign::Plus => Divergence::Left,
                Sign::Minus => Divergence::Right,
            });
        }
    }
    let involution = Involution {
        switches: (0..2 * g.num_switches()).map(|i| i ^ 1).collect(),
        edges: (0..2 * g.num_edges()).map(|i| i ^ 1).collect(),
    };
    let graph = TrackGraph::new(switches, edge_ids).map_err(|_| {
        TrackError::Structure("lifted ids collide; rename switches or edges".into())
    })?;
    OrientedTrack::new(graph, divergence, Some(involution))
}

/// One boundary walk of the ribbon graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    /// Corners in walk order: the switch and the slot through which the walk arrives.
    pub corners: Vec<(usize, Slot)>,
    pub cusps: usize,
}

impl Region {
    pub fn length(&self) -> usize {
        self.corners.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionReport {
    pub regions: Vec<Region>,
    pub euler_characteristic: i64,
    /// Genus of the closed surface obtained by capping each region with a
    /// disc; `None` when that surface is disconnected.
    pub genus: Option<i64>,
    pub components: usize,
}

impl RegionReport {
    pub fn total_cusps(&self) -> usize {
        self.regions.iter().map(|r| r.cusps).sum()
    }
}

pub fn region_analysis<T: Track + ?Sized>(t: &T) -> Result<RegionReport, TrackError> {
    t.ensure_valid()?;
    let g = t.graph();
    let he = g.half_edges();
    let mut visited = vec![false; 2 * g.num_edges()];
    let mut regions = Vec::new();
    for start in 0..2 * g.num_edges() {
        if visited[start] {
            continue;
        }
        let mut corners = Vec::new();
        let mut cusps = 0;
        let mut h = EdgeEnd::new(start / 2, start % 2);
        while !visited[h.key()] {
            visited[h.key()] = true;
            let arrive = he.other_end(h);
            let (s, slot) = he.at(arrive);
            if slot == Slot::Right {
                cusps += 1;
            }
            corners.push((s, slot));
            h = he.rotate(arrive);
        }
        regions.push(Region { corners, cusps });
    }
    let v = g.num_switches() as i64;
    let e = g.num_edges() as i64;
    let euler_characteristic = v - e + regions.len() as i64;
    let components = g.num_components();
    let genus = (components == 1).then(|| (2 - euler_characteristic) / 2);
    Ok(RegionReport {
        regions,
        euler_characteristic,
        genus,
        components,
    })
}

/// Cusp counts of the regions of the quotient of a cover by its involution.
/// A region carried to itself covers a quotient region with half its cusps;
/// a swapped pair covers one region with the cusps of either. `None`
/// without an involution.
pub fn quotient_region_cusps(c: &OrientedTrack) -> Result<Option<Vec<usize>>, TrackError> {
    let Some(inv) = c.involution() else {
        return Ok(None);
    };
    let report = region_analysis(c)?;
    let mut region_of = HashMap::new();
    for (i, r) in report.regions.iter().enumerate() {
        for &corner in &r.corners {
            region_of.insert(corner, i);
        }
    }
    let mut cusps = Vec::new();
    for (i, r) in report.regions.iter().enumerate() {
        let (s, slot) = r.corners[0];
        let image = region_of[&(inv.switches[s], slot)];
        if image == i {
            cusps.push(r.cusps / 2);
        } else if i < image {
            cusps.push(r.cusps);
        }
    }
    Ok(Some(cusps))
}

/// Euler characteristic of the filled-in quotient surface of a cover.
pub fn quotient_euler_characteristic(c: &OrientedTrack) -> Result<Option<i64>, TrackError> {
    let g = c.graph();
    let (v, e) = (g.num_switches() as i64 / 2, g.num_edges() as i64 / 2);
    Ok(quotient_region_cusps(c)?.map(|r| v - e + r.len() as i64))
}

/// Whether every complementary region is a trigon, as for a track carrying a
/// maximal lamination.
pub fn check_maximal_carrying<T: Track + ?Sized>(t: &T) -> Result<bool, TrackError> {
    let report = region_analysis(t)?;
    Ok(!report.regions.is_empty() && report.regions.iter().all(|r| r.cusps == 3))
}

/// Ribbon-graph isomorphism respecting slot roles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RibbonIsomorphism {
    pub switches: Vec<usize>,
    /// Image edge, and whether the ends are exchanged.
    pub edges: Vec<(usize, bool)>,
}

/// Finds an isomorphism `a -> b` carrying each slot to the slot of the same
/// role, if one exists. Both graphs need a valid slot bijection.
pub fn ribbon_isomorphism(a: &TrackGraph, b: &TrackGraph) -> Option<RibbonIsomorphism> {
    let mut ra = Vec::new();
    let mut rb = Vec::new();
    a.check_slots(&mut ra);
    b.check_slots(&mut rb);
    if !ra.is_empty() || !rb.is_empty() {
        return None;
    }
    if a.num_switches() != b.num_switches() || a.num_edges() != b.num_edges() {
        return None;
    }
    let (ha, hb) = (a.half_edges(), b.half_edges());
    let labels_a = a.components();
    let labels_b = b.components();
    let mut switch_map: Vec<Option<usize>> = vec![None; a.num_switches()];
    let mut edge_map: Vec<Option<(usize, bool)>> = vec![None; a.num_edges()];
    let mut used_b = vec![false; count_labels(&labels_b)];
    for comp in 0..count_labels(&labels_a) {
        let root = labels_a.iter().position(|&l| l == comp)?;
        let mut matched = false;
        for target in 0..b.num_switches() {
            if used_b[labels_b[target]] {
                continue;
            }
            if let Some((sm, em)) = grow_map(a, b, &ha, &hb, root, target) {
                for (k, v) in sm {
                    switch_map[k] = Some(v);
                }
                for (k, v) in em {
                    edge_map[k] = Some(v);
                }
                used_b[labels_b[target]] = true;
                matched = true;
                break;
            }
        }
        if !matched {
            return None;
        }
    }
    Some(RibbonIsomorphism {
        switches: switch_map.into_iter().collect::<Option<_>>()?,
        edges: edge_map.into_iter().collect::<Option<_>>()?,
    })
}

type PartialMaps = (BTreeMap<usize, usize>, BTreeMap<usize, (usize, bool)>);

fn grow_map(
    a: &TrackGraph,
    b: &TrackGraph,
    ha: &HalfEdges<'_>,
    hb: &HalfEdges<'_>,
    root: usize,
    target: usize,
) -> Option<PartialMaps> {
    let mut sm = BTreeMap::from([(root, target)]);
    let mut inverse = BTreeMap::from([(target, root)]);
    let mut em: BTreeMap<usize, (usize, bool)> = BTreeMap::new();
    let mut queue = VecDeque::from([root]);
    while let Some(s) = queue.pop_front() {
        let t = sm[&s];
        for slot in Slot::CCW {
            let ea = a.switches[s].slot(slot);
            let eb = b.switches[t].slot(slot);
            let flip = ea.end != eb.end;
            match em.get(&ea.edge) {
                Some(&(img, f)) if img != eb.edge || f != flip => return None,
                Some(_) => {}
                None => {
                    em.insert(ea.edge, (eb.edge, flip));
                }
            }
            let (sa, slot_a) = ha.at(ha.other_end(ea));
            let (sb, slot_b) = hb.at(hb.other_end(eb));
            if slot_a != slot_b {
                return None;
            }
            match (sm.get(&sa), inverse.get(&sb)) {
                (Some(&x), _) if x != sb => return None,
                (None, Some(_)) => return None,
                (None, None) => {
                    sm.insert(sa, sb);
                    inverse.insert(sb, sa);
                    queue.push_back(sa);
                }
                _ => {}
            }
        }
    }
    Some((sm, em))
}
