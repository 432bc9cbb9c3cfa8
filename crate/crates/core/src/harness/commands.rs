use super::config::FixtureSpec;
use crate::constructions::{Fixture, GraphSet};
use crate::dims::{induce_class, littlestone_dimension, vc_dimension, verify_vcd_upper};
use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::graph::{
    format_class, format_graph, format_graph_class, parse_class, parse_graph, parse_graph_class,
    GraphClass,
};
use crate::pac::{learn_neighborhoods, parse_clicks, NeighborhoodMode};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Graph classes up to this size are written out in full.
pub const WRITE_GRAPH_CLASS_LIMIT: usize = 4096;

/// What `construct` wrote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub fixture: String,
    pub spec: FixtureSpec,
    pub n: usize,
    pub declared_k: usize,
    pub arcs: usize,
    pub class_size: usize,
    pub graph_class_size: Option<String>,
    pub target: Option<usize>,
    pub graph_target: Option<String>,
    pub vertex_labels: Vec<String>,
    pub files: Vec<String>,
}

/// Write graph.txt, class.txt, graphs.txt (when small enough) and
/// manifest.json for a construction.
pub fn cmd_construct(spec: &FixtureSpec, out_dir: &Path) -> Result<Manifest> {
    let fx: Fixture = spec.build()?;
    std::fs::create_dir_all(out_dir)?;
    let mut files = vec!["graph.txt".to_string(), "class.txt".to_string()];
    std::fs::write(out_dir.join("graph.txt"), format_graph(&fx.graph))?;
    std::fs::write(out_dir.join("class.txt"), format_class(&fx.class))?;
    let mut size = None;
    if let Some(gs) = &fx.graphs {
        let fam = gs.as_family();
        size = Some(fam.len().to_string());
        let explicit = match gs {
            GraphSet::Explicit(gc) => Some(gc.clone()),
            GraphSet::Columns(_) if fam.len() <= WRITE_GRAPH_CLASS_LIMIT as u128 => {
                Some(fam.materialize(WRITE_GRAPH_CLASS_LIMIT)?)
            }
            GraphSet::Columns(_) => None,
        };
        if let Some(gc) = explicit {
            std::fs::write(out_dir.join("graphs.txt"), format_graph_class(gc.members()))?;
            files.push("graphs.txt".into());
        }
    }
    files.push("manifest.json".into());
    let manifest = Manifest {
        fixture: fx.name(),
        spec: spec.clone(),
        n: fx.n(),
        declared_k: fx.graph.declared_k(),
        arcs: fx.graph.arc_count(),
        class_size: fx.class.len(),
        graph_class_size: size,
        target: fx.target,
        graph_target: fx.graph_target.map(|t| t.to_string()),
        vertex_labels: fx.vertex_labels.clone(),
        files,
    };
    std::fs::write(out_dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(manifest)
}

/// Dimension report for a class, optionally under a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimsReport {
    pub n: usize,
    pub class_size: usize,
    pub d: usize,
    pub ldim: usize,
    pub k: Option<usize>,
    pub dbar: Option<usize>,
    pub ldim_induced: Option<usize>,
    pub induced_size: Option<usize>,
    pub bound: Option<usize>,
    pub holds: Option<bool>,
    pub near_bound: Option<bool>,
}

pub fn cmd_dims(class_text: &str, graph_text: Option<&str>) -> Result<DimsReport> {
    let cls = parse_class(class_text)?;
    let d = vc_dimension(cls.members())?;
    let ldim = littlestone_dimension(cls.members())?;
    let mut report = DimsReport {
        n: cls.n(),
        class_size: cls.len(),
        d,
        ldim,
        k: None,
        dbar: None,
        ldim_induced: None,
        induced_size: None,
        bound: None,
        holds: None,
        near_bound: None,
    };
    if let Some(text) = graph_text {
        let graph = parse_graph(text)?;
        if graph.n() != cls.n() {
            return Err(invalid("graph and class universes differ"));
        }
        let induced = induce_class(&graph, &cls)?;
        let vcd = verify_vcd_upper(&graph, &cls)?;
        report.k = Some(vcd.k);
        report.dbar = Some(vcd.dbar);
        report.ldim_induced = Some(littlestone_dimension(induced.members())?);
        report.induced_size = Some(induced.len());
        report.bound = Some(vcd.bound);
        report.holds = Some(vcd.holds);
        report.near_bound = Some(vcd.near_bound);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnGraphReport {
    pub graph: usize,
    pub degree_sum: usize,
    pub clicks: usize,
    pub selected: String,
}

/// Pick a graph from a click stream.
pub fn cmd_learn_graph(graphs_text: &str, clicks_text: &str, mode: NeighborhoodMode) -> Result<LearnGraphReport> {
    let gc = GraphClass::new(parse_graph_class(graphs_text)?)?;
    let clicks = parse_clicks(clicks_text)?;
    let g = learn_neighborhoods(&gc, &clicks, mode, Exec::default())?;
    let graph = gc.get(g);
    Ok(LearnGraphReport {
        graph: g,
        degree_sum: clicks.iter().map(|c| graph.neighbors(c.x).len()).sum(),
        clicks: clicks.len(),
        selected: format_graph(graph),
    })
}
