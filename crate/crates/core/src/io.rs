//! JSON readers and writers for tracks, weight systems and shear configurations.
//!
//! Rationals are written as `"p/q"` strings. Unknown fields are rejected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::rational::{format_rational, from_f64, parse_rational, ParseRationalError, Q};
use crate::shear::{LineDecomposition, ShearConfiguration, ShearError, ShearStep};
use crate::track::{
    BaseTrack, Divergence, EdgeEnd, Involution, OrientedTrack, Sign, Switch, Track, TrackError,
    TrackGraph,
};
use crate::weights::{WeightError, WeightSystem};

/// Inputs above this size are refused before parsing.
pub const MAX_INPUT_BYTES: usize = 16 << 20;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("input larger than {MAX_INPUT_BYTES} bytes")]
    TooLarge,
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Rational(#[from] ParseRationalError),
    #[error(transparent)]
    Track(#[from] TrackError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Shear(#[from] ShearError),
}

fn format_err<T>(msg: impl Into<String>) -> Result<T, IoError> {
    Err(IoError::Format(msg.into()))
}

fn check_size(s: &str) -> Result<(), IoError> {
    if s.len() > MAX_INPUT_BYTES {
        return Err(IoError::TooLarge);
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EndRefJson {
    edge: String,
    end: u8,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
enum DivergenceJson {
    L,
    R,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SwitchJson {
    id: String,
    trunk: EndRefJson,
    left: EndRefJson,
    right: EndRefJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    divergence: Option<DivergenceJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeJson {
    id: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InvolutionJson {
    switches: BTreeMap<String, String>,
    edges: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrackJson {
    switches: Vec<SwitchJson>,
    edges: Vec<EdgeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tie_transport: Option<BTreeMap<String, i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    involution: Option<InvolutionJson>,
}

/// A parsed track file: switches without divergence flags give a base
/// track, switches with flags an oriented one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyTrack {
    Base(BaseTrack),
    Oriented(OrientedTrack),
}

impl AnyTrack {
    pub fn as_track(&self) -> &dyn Track {
        match self {
            AnyTrack::Base(b) => b,
            AnyTrack::Oriented(o) => o,
        }
    }
}

fn lookup(map: &BTreeMap<&str, usize>, id: &str, what: &str) -> Result<usize, IoError> {
    map.get(id)
        .copied()
        .ok_or_else(|| IoError::Format(format!("unknown {what} {id:?}")))
}

fn index_ids<'a>(
    ids: impl Iterator<Item = &'a str>,
    what: &str,
) -> Result<BTreeMap<&'a str, usize>, IoError> {
    let mut map = BTreeMap::new();
    for (i, id) in ids.enumerate() {
        if map.insert(id, i).is_some() {
            return format_err(format!("duplicate {what} id {id:?}"));
        }
    }
    Ok(map)
}

fn end_ref(r: &EndRefJson, edges: &BTreeMap<&str, usize>) -> Result<EdgeEnd, IoError> {
    if r.end > 1 {
        return format_err(format!("edge end must be 0 or 1, got {}", r.end));
    }
    Ok(EdgeEnd::new(
        lookup(edges, &r.edge, "edge")?,
        r.end as usize,
    ))
}

fn index_map(
    pairs: &BTreeMap<String, String>,
    ids: &BTreeMap<&str, usize>,
    what: &str,
) -> Result<Vec<usize>, IoError> {
    if pairs.len() != ids.len() {
        return format_err(format!("involution must map every {what}"));
    }
    let mut out = vec![0; ids.len()];
    for (from, to) in pairs {
        out[lookup(ids, from, what)?] = lookup(ids, to, what)?;
    }
    Ok(out)
}

/// Parses a track file. Structural validity (trivalence, connectivity,
/// involution axioms) is not checked here.
pub fn parse_track(s: &str) -> Result<AnyTrack, IoError> {
    check_size(s)?;
    let raw: TrackJson = serde_json::from_str(s)?;
    let edges = index_ids(raw.edges.iter().map(|e| e.id.as_str()), "edge")?;
    let switch_ids = index_ids(raw.switches.iter().map(|s| s.id.as_str()), "switch")?;
    let switches = raw
        .switches
        .iter()
        .map(|s| {
            Ok(Switch {
                id: s.id.clone(),
                trunk: end_ref(&s.trunk, &edges)?,
                right: end_ref(&s.right, &edges)?,
                left: end_ref(&s.left, &edges)?,
            })
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    let graph = TrackGraph::new(switches, raw.edges.iter().map(|e| e.id.clone()).collect())?;
    let flags: Vec<Option<DivergenceJson>> = raw.switches.iter().map(|s| s.divergence).collect();
    let flagged = flags.iter().filter(|f| f.is_some()).count();
    if flagged == 0 {
        if raw.involution.is_some() {
            return format_err("an involution needs divergence flags");
        }
        let tie_transport = match &raw.tie_transport {
            None => vec![Sign::Plus; graph.num_edges()],
            Some(map) => {
                if map.len() != edges.len() {
                    return format_err("tie_transport must give a sign for every edge");
                }
                let mut signs = vec![Sign::Plus; edges.len()];
                for (id, &v) in map {
                    signs[lookup(&edges, id, "edge")?] = Sign::from_i64(v).ok_or_else(|| {
                        IoError::Format(format!("tie_transport for {id:?} must be 1 or -1"))
                    })?;
                }
                signs
            }
        };
        return Ok(AnyTrack::Base(BaseTrack::new(graph, tie_transport)?));
    }
    if flagged != flags.len() {
        return format_err("divergence flags must be given on all switches or on none");
    }
    if raw.tie_transport.is_some() {
        return format_err("tie_transport belongs to base tracks, not oriented ones");
    }
    let divergence = flags
        .into_iter()
        .map(|f| match f.expect("all flagged") {
            DivergenceJson::L => Divergence::Left,
            DivergenceJson::R => Divergence::Right,
        })
        .collect();
    let involution = match &raw.involution {
        None => None,
        Some(inv) => Some(Involution {
            switches: index_map(&inv.switches, &switch_ids, "switch")?,
            edges: index_map(&inv.edges, &edges, "edge")?,
        }),
    };
    Ok(AnyTrack::Oriented(OrientedTrack::new(
        graph, divergence, involution,
    )?))
}

fn end_json(g: &TrackGraph, e: EdgeEnd) -> EndRefJson {
    EndRefJson {
        edge: g.edge_ids()[e.edge].clone(),
        end: e.end as u8,
    }
}

fn graph_json(
    g: &TrackGraph,
    divergence: Option<&[Divergence]>,
) -> (Vec<SwitchJson>, Vec<EdgeJson>) {
    let switches = g
        .switches()
        .iter()
        .enumerate()
        .map(|(i, s)| SwitchJson {
            id: s.id.clone(),
            trunk: end_json(g, s.trunk),
            left: end_json(g, s.left),
            right: end_json(g, s.right),
            divergence: divergence.map(|d| match d[i] {
                Divergence::Left => DivergenceJson::L,
                Divergence::Right => DivergenceJson::R,
            }),
        })
        .collect();
    let edges = g
        .edge_ids()
        .iter()
        .map(|id| EdgeJson { id: id.clone() })
        .collect();
    (switches, edges)
}

fn to_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn write_track(t: &AnyTrack) -> String {
    let raw = match t {
        AnyTrack::Base(b) => {
            let g = b.graph();
            let (switches, edges) = graph_json(g, None);
            let tie_transport = g
                .edge_ids()
                .iter()
                .zip(b.tie_transport())
                .map(|(id, s)| (id.clone(), s.to_i64()))
                .collect();
            TrackJson {
                switches,
                edges,
                tie_transport: Some(tie_transport),
                involution: None,
            }
        }
        AnyTrack::Oriented(o) => {
            let g = o.graph();
            let (switches, edges) = graph_json(g, Some(o.divergence()));
            let involution = o.involution().map(|inv| InvolutionJson {
                switches: inv
                    .switches
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| (g.switches()[i].id.clone(), g.switches()[j].id.clone()))
                    .collect(),
                edges: inv
                    .edges
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| (g.edge_ids()[i].clone(), g.edge_ids()[j].clone()))
                    .collect(),
            });
            TrackJson {
                switches,
                edges,
                tie_transport: None,
                involution,
            }
        }
    };
    to_pretty(&raw)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsJson {
    d: usize,
    weights: BTreeMap<String, Vec<String>>,
}

/// Parses a weight file against the edges of `g`; every edge needs a vector
/// of length `d`.
pub fn parse_weights(s: &str, g: &TrackGraph) -> Result<WeightSystem, IoError> {
    check_size(s)?;
    let raw: WeightsJson = serde_json::from_str(s)?;
    if raw.d == 0 {
        return Err(WeightError::ZeroDimension.into());
    }
    if raw.weights.len() != g.num_edges() {
        return format_err(format!(
            "weights given for {} edges, track has {}",
            raw.weights.len(),
            g.num_edges()
        ));
    }
    let mut weights = vec![Vec::new(); g.num_edges()];
    for (id, values) in &raw.weights {
        let e = g
            .edge_index(id)
            .ok_or_else(|| IoError::Format(format!("unknown edge {id:?}")))?;
        if values.len() != raw.d {
            return format_err(format!(
                "edge {id:?} has {} coordinates, expected d = {}",
                values.len(),
                raw.d
            ));
        }
        weights[e] = values
            .iter()
            .map(|v| parse_rational(v))
            .collect::<Result<_, _>>()?;
    }
    Ok(WeightSystem::new(raw.d, weights)?)
}

pub fn write_weights(w: &WeightSystem, g: &TrackGraph) -> String {
    let raw = WeightsJson {
        d: w.dim(),
        weights: g
            .edge_ids()
            .iter()
            .zip(w.weights())
            .map(|(id, v)| (id.clone(), v.iter().map(format_rational).collect()))
            .collect(),
    };
    to_pretty(&raw)
}

/// A matrix entry or amplitude: a rational string or a JSON number.
#[derive(Serialize, Deserialize, Clone)]
#[serde(untagged)]
enum ScalarJson {
    Text(String),
    Number(serde_json::Number),
}

impl ScalarJson {
    fn value(&self) -> Result<Q, IoError> {
        match self {
            ScalarJson::Text(s) => Ok(parse_rational(s)?),
            ScalarJson::Number(n) => {
                if let Some(i) = n.as_i64() {
                    return Ok(crate::rational::int(i));
                }
                n.as_f64()
                    .and_then(from_f64)
                    .ok_or_else(|| IoError::Format(format!("unrepresentable number {n}")))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepJson {
    minus: Vec<Vec<ScalarJson>>,
    plus: Vec<Vec<ScalarJson>>,
    amplitude: Vec<ScalarJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TerminalJson {
    lines: Vec<Vec<ScalarJson>>,
    amplitude: Vec<ScalarJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShearJson {
    n: usize,
    steps: Vec<StepJson>,
    terminal: TerminalJson,
}

fn decomposition(rows: &[Vec<ScalarJson>], n: usize) -> Result<LineDecomposition, IoError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return format_err(format!("line decompositions must be {n}x{n}"));
    }
    let rows = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(ScalarJson::value)
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LineDecomposition::new(
        Matrix::from_rows(rows).expect("rectangular"),
    )?)
}

fn amplitude(v: &[ScalarJson]) -> Result<Vec<Q>, IoError> {
    v.iter().map(ScalarJson::value).collect()
}

/// Largest `n` accepted in configuration files.
pub const MAX_SHEAR_N: usize = 32;

pub fn parse_shear_config(s: &str) -> Result<ShearConfiguration, IoError> {
    check_size(s)?;
    let raw: ShearJson = serde_json::from_str(s)?;
    if raw.n < 2 || raw.n > MAX_SHEAR_N {
        return format_err(format!(
            "n must be between 2 and {MAX_SHEAR_N}, got {}",
            raw.n
        ));
    }
    let steps = raw
        .steps
        .iter()
        .map(|st| {
            Ok(ShearStep {
                minus: decomposition(&st.minus, raw.n)?,
                plus: decomposition(&st.plus, raw.n)?,
                amplitude: amplitude(&st.amplitude)?,
            })
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    Ok(ShearConfiguration::new(
        steps,
        decomposition(&raw.terminal.lines, raw.n)?,
        amplitude(&raw.terminal.amplitude)?,
    )?)
}

fn matrix_json(m: &Matrix<Q>) -> Vec<Vec<ScalarJson>> {
    m.to_rows()
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| ScalarJson::Text(format_rational(x)))
                .collect()
        })
        .collect()
}

fn amplitude_json(u: &[Q]) -> Vec<ScalarJson> {
    u.iter()
        .map(|x| ScalarJson::Text(format_rational(x)))
        .collect()
}

pub fn write_shear_config(cfg: &ShearConfiguration) -> String {
    let (terminal, terminal_amplitude) = cfg.terminal();
    let raw = ShearJson {
        n: cfg.n(),
        steps: cfg
            .steps()
            .iter()
            .map(|s| StepJson {
                minus: matrix_json(s.minus.lines()),
                plus: matrix_json(s.plus.lines()),
                amplitude: amplitude_json(&s.amplitude),
            })
            .collect(),
        terminal: TerminalJson {
            lines: matrix_json(terminal.lines()),
            amplitude: amplitude_json(terminal_amplitude),
        },
    };
    to_pretty(&raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{int, ratio};
    use crate::track::orientation_cover;

    #[test]
    fn track_round_trip() {
        for t in [
            AnyTrack::Base(fixtures::theta()),
            AnyTrack::Base(fixtures::genus2()),
            AnyTrack::Oriented(fixtures::theta_oriented()),
            AnyTrack::Oriented(orientation_cover(&fixtures::genus2()).unwrap()),
        ] {
            assert_eq!(parse_track(&write_track(&t)).unwrap(), t);
        }
    }

    #[test]
    fn unknown_fields_rejected() {
        let bad = r#"{"switches":[],"edges":[],"colour":1}"#;
        assert!(matches!(parse_track(bad), Err(IoError::Json(_))));
        let bad_end = r#"{"switches":[{"id":"A","trunk":{"edge":"e","end":0,"x":1},"left":{"edge":"e","end":1},"right":{"edge":"e","end":1}}],"edges":[{"id":"e"}]}"#;
        assert!(parse_track(bad_end).is_err());
    }

    #[test]
    fn mixed_flags_rejected() {
        let s = r#"{"switches":[
            {"id":"A","trunk":{"edge":"e1","end":0},"left":{"edge":"e2","end":0},"right":{"edge":"e3","end":0},"divergence":"L"},
            {"id":"B","trunk":{"edge":"e1","end":1},"left":{"edge":"e2","end":1},"right":{"edge":"e3","end":1}}],
            "edges":[{"id":"e1"},{"id":"e2"},{"id":"e3"}]}"#;
        assert!(matches!(parse_track(s), Err(IoError::Format(_))));
    }

    #[test]
    fn bad_references_rejected() {
        let s = r#"{"switches":[{"id":"A","trunk":{"edge":"zz","end":0},"left":{"edge":"e1","end":0},"right":{"edge":"e1","end":1}}],"edges":[{"id":"e1"}]}"#;
        assert!(matches!(parse_track(s), Err(IoError::Format(_))));
        let s = r#"{"switches":[{"id":"A","trunk":{"edge":"e1","end":2},"left":{"edge":"e1","end":0},"right":{"edge":"e1","end":1}}],"edges":[{"id":"e1"}]}"#;
        assert!(matches!(parse_track(s), Err(IoError::Format(_))));
    }

    #[test]
    fn tie_transport_values_checked() {
        let theta = write_track(&AnyTrack::Base(fixtures::theta()));
        let bad = theta.replacen("\"e1\": 1", "\"e1\": 2", 1);
        assert_ne!(bad, theta);
        assert!(matches!(parse_track(&bad), Err(IoError::Format(_))));
    }

    #[test]
    fn weights_round_trip() {
        let g = fixtures::theta().graph().clone();
        let w = WeightSystem::new(
            2,
            vec![
                vec![int(1), ratio(1, 3)],
                vec![int(0), ratio(-2, 7)],
                vec![int(1), ratio(5, 21)],
            ],
        )
        .unwrap();
        assert_eq!(parse_weights(&write_weights(&w, &g), &g).unwrap(), w);
    }

    #[test]
    fn weights_errors() {
        let g = fixtures::theta().graph().clone();
        let missing = r#"{"d":1,"weights":{"e1":["1"],"e2":["1"]}}"#;
        assert!(parse_weights(missing, &g).is_err());
        let long = r#"{"d":1,"weights":{"e1":["1","2"],"e2":["1"],"e3":["0"]}}"#;
        assert!(parse_weights(long, &g).is_err());
        let bad = r#"{"d":1,"weights":{"e1":["1.5"],"e2":["1"],"e3":["0"]}}"#;
        assert!(matches!(parse_weights(bad, &g), Err(IoError::Rational(_))));
    }

    #[test]
    fn shear_config_round_trip_and_numbers() {
        let s = r#"{"n":2,"steps":[{"minus":[[1,0],[0,1]],"plus":[["1","1/2"],[0,1]],"amplitude":["3/4"]}],
                   "terminal":{"lines":[[2,1],[1,1]],"amplitude":[0.5]}}"#;
        let cfg = parse_shear_config(s).unwrap();
        assert_eq!(cfg.terminal().1, &[ratio(1, 2)]);
        assert_eq!(parse_shear_config(&write_shear_config(&cfg)).unwrap(), cfg);
        let singular = s.replace("[[2,1],[1,1]]", "[[1,1],[1,1]]");
        assert!(matches!(
            parse_shear_config(&singular),
            Err(IoError::Shear(ShearError::Singular))
        ));
    }
}
