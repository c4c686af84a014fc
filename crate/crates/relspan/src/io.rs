//! File formats.
//!
//! * metric: JSON `{"n": int, "matrix": [[float]]}`
//! * graph: text, header `n m`, then one `u v w` line per edge
//! * plane graph: JSON graph plus per-vertex rotation lists
//! * cover: JSON `{"t", "clusters", "meta"}`
//! * spanners: JSON with construction parameters; random structure is
//!   rebuilt from the recorded seed on read and checked against the stored
//!   edge list
//!
//! All writes are atomic (temp file then rename).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::compose::{ClusterSpanner, Family, Model, ReliableSpanner, SubSpanner};
use crate::cover::{ClusterMeta, Cover};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::metric::FiniteMetric;
use crate::plane::PlaneGraph;
use crate::uniform::{
    build_g2t, build_g2t_minus_1, ConstantsMode, SpannerMode, Structure, UniformSpanner,
};

/// Write atomically: temp file in the same directory, then rename.
pub fn atomic_write(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}tmp~",
        path.extension()
            .map(|e| format!("{}.", e.to_string_lossy()))
            .unwrap_or_default()
    ));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

// ---------------------------------------------------------------- metric

#[derive(Serialize, Deserialize)]
struct MetricDto {
    n: usize,
    matrix: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

pub fn write_metric(path: &Path, m: &FiniteMetric) -> Result<()> {
    let dto = MetricDto {
        n: m.n(),
        matrix: m.matrix(),
        labels: m.labels().map(|l| l.to_vec()),
    };
    atomic_write(path, &serde_json::to_string(&dto)?)
}

pub fn read_metric(path: &Path) -> Result<FiniteMetric> {
    let dto: MetricDto = serde_json::from_str(&fs::read_to_string(path)?)?;
    if dto.matrix.len() != dto.n {
        return Err(Error::Format(format!(
            "metric claims n={} but matrix has {} rows",
            dto.n,
            dto.matrix.len()
        )));
    }
    let mut m = FiniteMetric::from_matrix(dto.matrix)?;
    if let Some(labels) = dto.labels {
        m.set_labels(labels);
    }
    Ok(m)
}

// ----------------------------------------------------------------- graph

pub fn write_graph(path: &Path, g: &WeightedGraph) -> Result<()> {
    let mut out = format!("{} {}\n", g.n(), g.num_edges());
    for &(u, v, w) in g.edges() {
        out.push_str(&format!("{u} {v} {w}\n"));
    }
    atomic_write(path, &out)
}

pub fn read_graph(path: &Path) -> Result<WeightedGraph> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty graph file".into()))?;
    let mut hp = header.split_whitespace();
    let n: usize = parse_field(hp.next(), "n")?;
    let m: usize = parse_field(hp.next(), "m")?;
    let mut edges = Vec::with_capacity(m);
    for line in lines {
        let mut parts = line.split_whitespace();
        let u: usize = parse_field(parts.next(), "u")?;
        let v: usize = parse_field(parts.next(), "v")?;
        let w: f64 = parse_field(parts.next(), "w")?;
        edges.push((u, v, w));
    }
    if edges.len() != m {
        return Err(Error::Format(format!(
            "graph header claims {m} edges, found {}",
            edges.len()
        )));
    }
    WeightedGraph::new(n, &edges)
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, name: &str) -> Result<T> {
    field
        .ok_or_else(|| Error::Format(format!("missing field {name}")))?
        .parse()
        .map_err(|_| Error::Format(format!("cannot parse field {name}")))
}

// ----------------------------------------------------------- plane graph

#[derive(Serialize, Deserialize)]
struct PlaneDto {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    rotation: Vec<Vec<usize>>,
}

pub fn write_plane(path: &Path, pg: &PlaneGraph) -> Result<()> {
    let dto = PlaneDto {
        n: pg.n(),
        edges: pg.graph().edges().to_vec(),
        rotation: pg.rotation().to_vec(),
    };
    atomic_write(path, &serde_json::to_string(&dto)?)
}

pub fn read_plane(path: &Path) -> Result<PlaneGraph> {
    let dto: PlaneDto = serde_json::from_str(&fs::read_to_string(path)?)?;
    PlaneGraph::new(WeightedGraph::new(dto.n, &dto.edges)?, dto.rotation)
}

// ----------------------------------------------------------------- cover

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum MetaDto {
    Ring { separator: usize, radius: f64 },
    Ball { center: usize, level: i32, radius: f64 },
}

#[derive(Serialize, Deserialize)]
struct CoverDto {
    t: f64,
    clusters: Vec<Vec<usize>>,
    meta: Vec<Option<MetaDto>>,
}

pub fn write_cover(path: &Path, c: &Cover) -> Result<()> {
    let dto = CoverDto {
        t: c.advertised_t,
        clusters: c.clusters.iter().map(|cl| cl.points.clone()).collect(),
        meta: c
            .clusters
            .iter()
            .map(|cl| {
                cl.meta.map(|m| match m {
                    ClusterMeta::Ring { separator, radius } => MetaDto::Ring { separator, radius },
                    ClusterMeta::Ball {
                        center,
                        level,
                        radius,
                    } => MetaDto::Ball {
                        center,
                        level,
                        radius,
                    },
                })
            })
            .collect(),
    };
    atomic_write(path, &serde_json::to_string(&dto)?)
}

/// Read a cover; cluster diameters are recomputed from the metric.
pub fn read_cover(path: &Path, m: &FiniteMetric) -> Result<Cover> {
    let dto: CoverDto = serde_json::from_str(&fs::read_to_string(path)?)?;
    if dto.meta.len() != dto.clusters.len() {
        return Err(Error::Format(
            "cover meta array does not match cluster count".into(),
        ));
    }
    let sets = dto
        .clusters
        .into_iter()
        .zip(dto.meta)
        .map(|(points, meta)| {
            let meta = meta.map(|md| match md {
                MetaDto::Ring { separator, radius } => ClusterMeta::Ring { separator, radius },
                MetaDto::Ball {
                    center,
                    level,
                    radius,
                } => ClusterMeta::Ball {
                    center,
                    level,
                    radius,
                },
            });
            (points, meta)
        })
        .collect();
    Cover::from_sets(m, dto.t, sets)
}

// ------------------------------------------------------- uniform spanner

#[derive(Serialize, Deserialize)]
struct UniformSpannerDto {
    mode: String,
    n: usize,
    theta: f64,
    t: usize,
    d: usize,
    seed: u64,
    constants: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    centers: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    blocks: Option<Vec<Vec<usize>>>,
    edges: Vec<(usize, usize)>,
}

fn uniform_to_dto(s: &UniformSpanner) -> UniformSpannerDto {
    UniformSpannerDto {
        mode: s.mode.name().to_string(),
        n: s.n,
        theta: s.params.theta,
        t: s.params.t,
        d: s.params.d,
        seed: s.params.seed,
        constants: s.params.constants.to_string(),
        centers: match &s.structure {
            Structure::Constellation { centers, .. } => Some(centers.clone()),
            _ => None,
        },
        blocks: match &s.structure {
            Structure::Blocks { blocks, .. } => Some(blocks.clone()),
            _ => None,
        },
        edges: s.graph.edges().iter().map(|&(u, v, _)| (u, v)).collect(),
    }
}

fn uniform_from_dto(dto: UniformSpannerDto) -> Result<UniformSpanner> {
    let constants: ConstantsMode = dto.constants.parse()?;
    let rebuilt = match dto.mode.as_str() {
        "constellation" => {
            let centers = dto
                .centers
                .ok_or_else(|| Error::Format("constellation without centers".into()))?;
            let mut edges = Vec::new();
            for &c in &centers {
                for v in 0..dto.n {
                    if v != c {
                        edges.push((c, v, 1.0));
                    }
                }
            }
            UniformSpanner {
                n: dto.n,
                graph: WeightedGraph::new(dto.n, &edges)?,
                mode: SpannerMode::Constellation,
                params: crate::uniform::SpannerParams {
                    theta: dto.theta,
                    t: dto.t,
                    d: dto.d,
                    seed: dto.seed,
                    constants,
                },
                structure: Structure::Constellation {
                    centers: centers.clone(),
                    draws: crate::uniform::constellation_draws(dto.theta),
                },
            }
        }
        "expander_2t" => build_g2t(dto.n, dto.theta, dto.t, dto.seed, constants)?,
        "expander_2t_minus_1" => build_g2t_minus_1(dto.n, dto.theta, dto.t, dto.seed, constants)?,
        other => return Err(Error::Format(format!("unknown spanner mode {other:?}"))),
    };
    // the rebuilt structure must reproduce the stored edge list
    let stored: Vec<(usize, usize)> = dto.edges;
    let rebuilt_edges: Vec<(usize, usize)> = rebuilt
        .graph
        .edges()
        .iter()
        .map(|&(u, v, _)| (u, v))
        .collect();
    if stored != rebuilt_edges {
        return Err(Error::Format(
            "stored spanner edges do not match the seeded reconstruction".into(),
        ));
    }
    Ok(rebuilt)
}

pub fn write_uniform_spanner(path: &Path, s: &UniformSpanner) -> Result<()> {
    atomic_write(path, &serde_json::to_string(&uniform_to_dto(s))?)
}

pub fn read_uniform_spanner(path: &Path) -> Result<UniformSpanner> {
    let dto: UniformSpannerDto = serde_json::from_str(&fs::read_to_string(path)?)?;
    uniform_from_dto(dto)
}

// ------------------------------------------------------ reliable spanner

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SubDto {
    Constellation { centers: Vec<usize> },
    Expander { spanner: UniformSpannerDto },
    Complete,
}

#[derive(Serialize, Deserialize)]
struct ClusterSpannerDto {
    members: Vec<usize>,
    theta_inner: f64,
    sub: SubDto,
}

#[derive(Serialize, Deserialize)]
struct ReliableSpannerDto {
    n: usize,
    model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<String>,
    theta: f64,
    cover_t: f64,
    cover_depth: usize,
    delta_adv: f64,
    hop_adv: usize,
    improved_bound: f64,
    complete_fallbacks: usize,
    edges: Vec<(usize, usize, f64)>,
    clusters: Vec<ClusterSpannerDto>,
}

pub fn write_reliable_spanner(path: &Path, rs: &ReliableSpanner) -> Result<()> {
    let dto = ReliableSpannerDto {
        n: rs.n,
        model: match rs.model {
            Model::Oblivious => "oblivious".into(),
            Model::Deterministic => "deterministic".into(),
        },
        family: rs.family.map(|f| f.name().to_string()),
        theta: rs.theta,
        cover_t: rs.cover_t,
        cover_depth: rs.cover_depth,
        delta_adv: rs.delta_adv,
        hop_adv: rs.hop_adv,
        improved_bound: rs.improved_bound,
        complete_fallbacks: rs.complete_fallbacks,
        edges: rs.edges.clone(),
        clusters: rs
            .clusters
            .iter()
            .map(|c| ClusterSpannerDto {
                members: c.members.clone(),
                theta_inner: c.theta_inner,
                sub: match &c.sub {
                    SubSpanner::Constellation { centers } => SubDto::Constellation {
                        centers: centers.clone(),
                    },
                    SubSpanner::Expander(us) => SubDto::Expander {
                        spanner: uniform_to_dto(us),
                    },
                    SubSpanner::Complete => SubDto::Complete,
                },
            })
            .collect(),
    };
    atomic_write(path, &serde_json::to_string(&dto)?)
}

pub fn read_reliable_spanner(path: &Path) -> Result<ReliableSpanner> {
    let dto: ReliableSpannerDto = serde_json::from_str(&fs::read_to_string(path)?)?;
    let model: Model = dto.model.parse()?;
    let family: Option<Family> = match dto.family {
        Some(f) => Some(f.parse()?),
        None => None,
    };
    let clusters = dto
        .clusters
        .into_iter()
        .map(|c| {
            let sub = match c.sub {
                SubDto::Constellation { centers } => SubSpanner::Constellation { centers },
                SubDto::Expander { spanner } => {
                    SubSpanner::Expander(Box::new(uniform_from_dto(spanner)?))
                }
                SubDto::Complete => SubSpanner::Complete,
            };
            Ok(ClusterSpanner {
                members: c.members,
                theta_inner: c.theta_inner,
                sub,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReliableSpanner {
        n: dto.n,
        edges: dto.edges,
        clusters,
        theta: dto.theta,
        cover_t: dto.cover_t,
        cover_depth: dto.cover_depth,
        delta_adv: dto.delta_adv,
        hop_adv: dto.hop_adv,
        improved_bound: dto.improved_bound,
        model,
        family,
        complete_fallbacks: dto.complete_fallbacks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compose::{build_reliable, BuildParams};
    use crate::instance::{grid, random_tree, GenParams};
    use crate::instance::{layered, Instance};

    fn tmpdir() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn metric_round_trip() {
        let dir = tmpdir();
        let path = dir.path().join("m.json");
        let m = layered(&GenParams {
            n: 12,
            h: 3,
            t: 2.0,
            eps: 0.01,
        })
        .unwrap();
        write_metric(&path, &m).unwrap();
        assert_eq!(read_metric(&path).unwrap(), m);
    }

    #[test]
    fn graph_round_trip() {
        let dir = tmpdir();
        let path = dir.path().join("g.txt");
        let g = random_tree(17, 3);
        write_graph(&path, &g).unwrap();
        assert_eq!(read_graph(&path).unwrap(), g);
    }

    #[test]
    fn plane_round_trip() {
        let dir = tmpdir();
        let path = dir.path().join("pg.json");
        let pg = grid(4, 3);
        write_plane(&path, &pg).unwrap();
        assert_eq!(read_plane(&path).unwrap(), pg);
    }

    #[test]
    fn cover_round_trip() {
        let dir = tmpdir();
        let path = dir.path().join("c.json");
        let tree = random_tree(24, 5);
        let m = crate::metric::shortest_path_metric(&tree).unwrap();
        let c = crate::cover::tree_cover(&tree, 0.5).unwrap();
        write_cover(&path, &c).unwrap();
        assert_eq!(read_cover(&path, &m).unwrap(), c);
    }

    #[test]
    fn uniform_spanner_round_trip() {
        let dir = tmpdir();
        for s in [
            crate::uniform::constellation(20, 0.25, 7),
            crate::uniform::build_g2t(32, 0.25, 2, 3, ConstantsMode::Practical).unwrap(),
            crate::uniform::build_g2t_minus_1(64, 0.5, 2, 4, ConstantsMode::Practical).unwrap(),
        ] {
            let path = dir.path().join(format!("{}.json", s.mode.name()));
            write_uniform_spanner(&path, &s).unwrap();
            assert_eq!(read_uniform_spanner(&path).unwrap(), s);
        }
    }

    #[test]
    fn reliable_spanner_round_trip() {
        let dir = tmpdir();
        let path = dir.path().join("rs.json");
        let inst = Instance::Graph(random_tree(24, 9));
        for model in [Model::Oblivious, Model::Deterministic] {
            let out = build_reliable(
                &inst,
                Family::Tree,
                model,
                &BuildParams {
                    seed: 2,
                    ..Default::default()
                },
            )
            .unwrap();
            write_reliable_spanner(&path, &out.spanner).unwrap();
            assert_eq!(read_reliable_spanner(&path).unwrap(), out.spanner);
        }
    }

    #[test]
    fn tampered_spanner_is_rejected() {
        let dir = tmpdir();
        let path = dir.path().join("s.json");
        let s = crate::uniform::build_g2t(32, 0.25, 2, 3, ConstantsMode::Practical).unwrap();
        write_uniform_spanner(&path, &s).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let tampered = text.replacen("\"seed\":3", "\"seed\":4", 1);
        std::fs::write(&path, tampered).unwrap();
        assert!(matches!(
            read_uniform_spanner(&path),
            Err(Error::Format(_))
        ));
    }
}
