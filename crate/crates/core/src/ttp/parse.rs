//! Reader and writer for the usual TTP benchmark layout:
//!
//! ```text
//! PROBLEM NAME: 	eil51-TTP
//! KNAPSACK DATA TYPE: 	bounded strongly corr
//! DIMENSION:	51
//! NUMBER OF ITEMS: 	50
//! CAPACITY OF KNAPSACK: 	4029
//! MIN SPEED: 	0.1
//! MAX SPEED: 	1
//! RENTING RATIO: 	1.63
//! EDGE_WEIGHT_TYPE:	CEIL_2D
//! NODE_COORD_SECTION	(INDEX, X, Y):
//! 1	37.00	52.00
//! ...
//! ITEMS SECTION	(INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):
//! 1	101	1	2
//! ```
//!
//! Node and item ids are 1-based in the file and 0-based in memory. The
//! renting ratio is kept for round trips but plays no role in evaluation.

use std::fmt::Write as _;

use super::instance::{DistanceKind, Item, TtpInstance};
use super::TtpError;

#[derive(PartialEq)]
enum Section {
    Header,
    Nodes,
    Items,
}

fn err(line: usize, message: impl Into<String>) -> TtpError {
    TtpError::Parse { line, message: message.into() }
}

fn num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, TtpError> {
    tok.trim().parse().map_err(|_| err(line, format!("bad {what} `{}`", tok.trim())))
}

pub fn parse_ttp(text: &str) -> Result<TtpInstance, TtpError> {
    let mut section = Section::Header;
    let mut name = String::new();
    let mut data_type = String::new();
    let mut dimension: Option<usize> = None;
    let mut item_count: Option<usize> = None;
    let mut capacity: Option<f64> = None;
    let mut v_min: Option<f64> = None;
    let mut v_max: Option<f64> = None;
    let mut renting = 0.0;
    let mut kind = DistanceKind::Ceil2d;
    let mut coords: Vec<(f64, f64)> = Vec::new();
    let mut items: Vec<Item> = Vec::new();
    let mut saw_nodes = false;
    let mut saw_items = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line == "EOF" {
            continue;
        }
        let upper = line.to_ascii_uppercase();
        if upper.starts_with("NODE_COORD_SECTION") {
            section = Section::Nodes;
            saw_nodes = true;
            continue;
        }
        if upper.starts_with("ITEMS SECTION") {
            section = Section::Items;
            saw_items = true;
            continue;
        }
        match section {
            Section::Header => {
                let (key, value) =
                    line.split_once(':').ok_or_else(|| err(line_no, format!("unexpected header line `{line}`")))?;
                let value = value.trim();
                match key.trim().to_ascii_uppercase().as_str() {
                    "PROBLEM NAME" => name = value.to_string(),
                    "KNAPSACK DATA TYPE" => data_type = value.to_string(),
                    "DIMENSION" => dimension = Some(num(value, line_no, "dimension")?),
                    "NUMBER OF ITEMS" => item_count = Some(num(value, line_no, "item count")?),
                    "CAPACITY OF KNAPSACK" => capacity = Some(num(value, line_no, "capacity")?),
                    "MIN SPEED" => v_min = Some(num(value, line_no, "speed")?),
                    "MAX SPEED" => v_max = Some(num(value, line_no, "speed")?),
                    "RENTING RATIO" => renting = num(value, line_no, "renting ratio")?,
                    "EDGE_WEIGHT_TYPE" => {
                        kind = DistanceKind::from_keyword(value)
                            .ok_or_else(|| err(line_no, format!("unsupported edge weight type `{value}`")))?
                    }
                    _ => {}
                }
            }
            Section::Nodes => {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(err(line_no, "node line needs an id and two coordinates"));
                }
                let id: usize = num(toks[0], line_no, "node id")?;
                if id != coords.len() + 1 {
                    return Err(err(line_no, format!("expected node {}, found {id}", coords.len() + 1)));
                }
                coords.push((num(toks[1], line_no, "coordinate")?, num(toks[2], line_no, "coordinate")?));
            }
            Section::Items => {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 4 {
                    return Err(err(line_no, "item line needs an id, a profit, a weight and a node"));
                }
                let id: usize = num(toks[0], line_no, "item id")?;
                if id != items.len() + 1 {
                    return Err(err(line_no, format!("expected item {}, found {id}", items.len() + 1)));
                }
                let city: usize = num(toks[3], line_no, "node")?;
                if city == 0 {
                    return Err(err(line_no, "node ids start at 1"));
                }
                items.push(Item {
                    profit: num(toks[1], line_no, "profit")?,
                    weight: num(toks[2], line_no, "weight")?,
                    city: city - 1,
                });
            }
        }
    }

    if !saw_nodes {
        return Err(TtpError::Missing("NODE_COORD_SECTION"));
    }
    if !saw_items {
        return Err(TtpError::Missing("ITEMS SECTION"));
    }
    let dimension = dimension.ok_or(TtpError::Missing("DIMENSION"))?;
    let item_count = item_count.ok_or(TtpError::Missing("NUMBER OF ITEMS"))?;
    let capacity = capacity.ok_or(TtpError::Missing("CAPACITY OF KNAPSACK"))?;
    let v_min = v_min.ok_or(TtpError::Missing("MIN SPEED"))?;
    let v_max = v_max.ok_or(TtpError::Missing("MAX SPEED"))?;
    if coords.len() != dimension {
        return Err(err(0, format!("DIMENSION is {dimension}, found {} nodes", coords.len())));
    }
    if items.len() != item_count {
        return Err(err(0, format!("NUMBER OF ITEMS is {item_count}, found {}", items.len())));
    }
    Ok(TtpInstance::new(name, coords, kind, items, capacity, v_min, v_max, renting)?.with_data_type(data_type))
}

pub fn serialize_ttp(instance: &TtpInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "PROBLEM NAME: \t{}", instance.name);
    let _ = writeln!(out, "KNAPSACK DATA TYPE: \t{}", instance.data_type);
    let _ = writeln!(out, "DIMENSION:\t{}", instance.city_count());
    let _ = writeln!(out, "NUMBER OF ITEMS: \t{}", instance.item_count());
    let _ = writeln!(out, "CAPACITY OF KNAPSACK: \t{}", instance.capacity);
    let _ = writeln!(out, "MIN SPEED: \t{}", instance.v_min);
    let _ = writeln!(out, "MAX SPEED: \t{}", instance.v_max);
    let _ = writeln!(out, "RENTING RATIO: \t{}", instance.renting_ratio);
    let _ = writeln!(out, "EDGE_WEIGHT_TYPE:\t{}", instance.distance_kind.keyword());
    let _ = writeln!(out, "NODE_COORD_SECTION\t(INDEX, X, Y): ");
    for (i, (x, y)) in instance.coords.iter().enumerate() {
        let _ = writeln!(out, "{}\t{}\t{}", i + 1, x, y);
    }
    let _ = writeln!(out, "ITEMS SECTION\t(INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER): ");
    for (j, it) in instance.items.iter().enumerate() {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", j + 1, it.profit, it.weight, it.city + 1);
    }
    out
}
