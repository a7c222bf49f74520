//! JSON interchange formats for structures, digraphs, operation tables and gadget sidecars.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::OperationTable;
use crate::gadget::{GadgetDigraph, GadgetVertex};
use crate::structures::{power, Digraph, Relation, RelationalStructure, StructureError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("relation `{0}` is empty")]
    EmptyRelation(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("operation table: {0}")]
    Table(String),
}

#[derive(Debug, Serialize, Deserialize)]
struct RelationFile {
    name: String,
    arity: usize,
    tuples: Vec<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct StructureFile {
    domain: Vec<String>,
    relations: Vec<RelationFile>,
}

#[derive(Debug, Serialize, Deserialize)]
struct DigraphFile {
    vertices: Vec<String>,
    edges: Vec<[String; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TableFile {
    arity: usize,
    map: Vec<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SidecarEntry {
    pub vertex: String,
    pub kind: String,
    pub level: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tuple: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
}

fn lookup(index: &HashMap<&str, usize>, name: &str) -> Result<usize, FormatError> {
    index
        .get(name)
        .copied()
        .ok_or_else(|| FormatError::UnknownElement(name.to_string()))
}

pub fn parse_structure(text: &str) -> Result<RelationalStructure, FormatError> {
    let file: StructureFile = serde_json::from_str(text)?;
    let index: HashMap<&str, usize> = file
        .domain
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut relations = Vec::with_capacity(file.relations.len());
    for rel in &file.relations {
        if rel.tuples.is_empty() {
            return Err(FormatError::EmptyRelation(rel.name.clone()));
        }
        let tuples = rel
            .tuples
            .iter()
            .map(|t| t.iter().map(|x| lookup(&index, x)).collect())
            .collect::<Result<Vec<Vec<usize>>, _>>()?;
        relations.push(Relation::new(rel.name.clone(), rel.arity, tuples)?);
    }
    Ok(RelationalStructure::new(file.domain.clone(), relations)?)
}

pub fn structure_to_json(a: &RelationalStructure) -> String {
    let file = StructureFile {
        domain: a.elements().to_vec(),
        relations: a
            .relations()
            .iter()
            .map(|r| RelationFile {
                name: r.name().to_string(),
                arity: r.arity(),
                tuples: r
                    .tuples()
                    .iter()
                    .map(|t| t.iter().map(|&x| a.element_name(x).to_string()).collect())
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("serializable") + "\n"
}

pub fn parse_digraph(text: &str) -> Result<Digraph, FormatError> {
    let file: DigraphFile = serde_json::from_str(text)?;
    let index: HashMap<&str, usize> = file
        .vertices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let edges = file
        .edges
        .iter()
        .map(|[a, b]| Ok((lookup(&index, a)?, lookup(&index, b)?)))
        .collect::<Result<Vec<_>, FormatError>>()?;
    Ok(Digraph::new(file.vertices.clone(), edges)?)
}

pub fn digraph_to_json(g: &Digraph) -> String {
    let file = DigraphFile {
        vertices: g.vertices().to_vec(),
        edges: g
            .edges()
            .iter()
            .map(|&(a, b)| [g.vertex_name(a).to_string(), g.vertex_name(b).to_string()])
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("serializable") + "\n"
}

/// Reads a table over the domain of `a`; every argument tuple must appear exactly once.
pub fn parse_table(text: &str, a: &RelationalStructure) -> Result<OperationTable, FormatError> {
    let file: TableFile = serde_json::from_str(text)?;
    let n = a.size();
    let size = power(n, file.arity);
    if size > (1 << 24) {
        return Err(FormatError::Table(format!("{size} rows is too many")));
    }
    let mut values: Vec<Option<usize>> = vec![None; size as usize];
    for row in &file.map {
        if row.len() != file.arity + 1 {
            return Err(FormatError::Table(format!(
                "row of length {} for arity {}",
                row.len(),
                file.arity
            )));
        }
        let idx = row
            .iter()
            .map(|x| {
                a.element_index(x)
                    .ok_or_else(|| FormatError::UnknownElement(x.clone()))
            })
            .collect::<Result<Vec<usize>, _>>()?;
        let slot = crate::structures::tuple_index(&idx[..file.arity], n);
        if values[slot].replace(idx[file.arity]).is_some() {
            return Err(FormatError::Table("duplicate argument tuple".into()));
        }
    }
    let values = values
        .into_iter()
        .collect::<Option<Vec<usize>>>()
        .ok_or_else(|| FormatError::Table("table is not total".into()))?;
    Ok(OperationTable::from_values(n, file.arity, values).expect("checked above"))
}

pub fn table_to_json(table: &OperationTable, names: &[String]) -> String {
    use crate::algebra::Operation;
    let file = TableFile {
        arity: table.arity(),
        map: table
            .rows()
            .map(|(args, v)| {
                args.iter()
                    .chain(std::iter::once(&v))
                    .map(|&x| names[x].clone())
                    .collect()
            })
            .collect(),
    };
    serde_json::to_string(&file).expect("serializable") + "\n"
}

/// Per-vertex tag and level for a gadget.
pub fn sidecar(d: &GadgetDigraph) -> Vec<SidecarEntry> {
    let a = d.template();
    let tuple_names = |r: usize| {
        d.tuple(r)
            .iter()
            .map(|&x| a.element_name(x).to_string())
            .collect()
    };
    (0..d.vertex_count())
        .map(|v| {
            let vertex = d.digraph().vertex_name(v).to_string();
            let level = d.level(v);
            match d.tag(v) {
                GadgetVertex::Element(x) => SidecarEntry {
                    vertex,
                    kind: "element".into(),
                    level,
                    element: Some(a.element_name(x).to_string()),
                    tuple: None,
                    step: None,
                },
                GadgetVertex::Tuple(r) => SidecarEntry {
                    vertex,
                    kind: "tuple".into(),
                    level,
                    element: None,
                    tuple: Some(tuple_names(r)),
                    step: None,
                },
                GadgetVertex::Internal { edge, step } => {
                    let p = d.path(edge);
                    SidecarEntry {
                        vertex,
                        kind: "internal".into(),
                        level,
                        element: Some(a.element_name(p.element).to_string()),
                        tuple: Some(tuple_names(p.tuple)),
                        step: Some(step),
                    }
                }
            }
        })
        .collect()
}

pub fn sidecar_to_json(d: &GadgetDigraph) -> String {
    serde_json::to_string_pretty(&sidecar(d)).expect("serializable") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_CYCLE: &str = r#"{"domain":["0","1"],"relations":[{"name":"E","arity":2,"tuples":[["0","1"],["1","0"]]}]}"#;

    #[test]
    fn structure_round_trip() {
        let a = parse_structure(TWO_CYCLE).unwrap();
        assert_eq!(a.size(), 2);
        assert_eq!(parse_structure(&structure_to_json(&a)).unwrap(), a);
    }

    #[test]
    fn empty_relation_is_rejected() {
        let text = r#"{"domain":["0"],"relations":[{"name":"R","arity":1,"tuples":[]}]}"#;
        assert!(matches!(
            parse_structure(text),
            Err(FormatError::EmptyRelation(_))
        ));
    }

    #[test]
    fn unknown_element_is_rejected() {
        let text = r#"{"domain":["0"],"relations":[{"name":"R","arity":1,"tuples":[["9"]]}]}"#;
        assert!(matches!(
            parse_structure(text),
            Err(FormatError::UnknownElement(_))
        ));
    }

    #[test]
    fn digraph_round_trip() {
        let g = parse_digraph(r#"{"vertices":["u","v"],"edges":[["u","v"]]}"#).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(parse_digraph(&digraph_to_json(&g)).unwrap(), g);
    }

    #[test]
    fn table_round_trip() {
        let a = parse_structure(TWO_CYCLE).unwrap();
        let t = OperationTable::from_fn(2, 2, |x| x[0].max(x[1]));
        let text = table_to_json(&t, a.elements());
        assert_eq!(parse_table(&text, &a).unwrap(), t);
        assert!(parse_table(r#"{"arity":1,"map":[["0","1"]]}"#, &a).is_err());
    }
}
