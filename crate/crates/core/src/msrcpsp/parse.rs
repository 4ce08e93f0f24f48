//! Reader and writer for iMOPSE-style `.def` instance files.
//!
//! ```text
//! # comment lines start with '#'
//! Project name:            100_5_20_9_D3
//! Tasks:                   100
//! Resources:               5
//! Precedence relations:    51
//! Number of skill types:   9
//! =====================================================
//! ResourceID     Salary     Skills
//! 1              52.2       Q0: 2   Q4: 1
//! =====================================================
//! TaskID     Duration     Skills     Predecessors
//! 1          19           Q4: 2
//! 2          12           Q6: 0      1
//! ```
//!
//! Skills are written `Q<type>: <level>` (the space after the colon is
//! optional). Lines made only of `=` or `-` separate sections. `Tasks` and
//! `Resources` header counts are mandatory and must match the section
//! contents. A `Precedence relations` mismatch is only logged. `Number of
//! skill types` is taken as given when present. Other header keys are ignored.

use std::fmt::Write as _;

use super::instance::{MsrcpspInstance, Resource, Skill, Task};
use super::MsrcpspError;

#[derive(PartialEq)]
enum Section {
    Header,
    Resources,
    Tasks,
}

fn err(line: usize, message: impl Into<String>) -> MsrcpspError {
    MsrcpspError::Parse { line, message: message.into() }
}

/// Splits a data line into tokens, gluing `Q4:` `2` back into `Q4:2`.
fn tokens(line: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut glue = false;
    for tok in line.split_whitespace() {
        if glue {
            out.last_mut().expect("glue follows a token").push_str(tok);
            glue = false;
        } else {
            out.push(tok.to_string());
            glue = tok.ends_with(':');
        }
    }
    out
}

fn parse_skill(tok: &str, line: usize) -> Result<Skill, MsrcpspError> {
    let (kind, level) = tok.split_once(':').ok_or_else(|| err(line, format!("malformed skill `{tok}`")))?;
    let kind = kind.trim_start_matches(|c: char| c.is_ascii_alphabetic());
    let kind: u32 = kind.parse().map_err(|_| err(line, format!("malformed skill type in `{tok}`")))?;
    let level: u32 = level.parse().map_err(|_| err(line, format!("malformed skill level in `{tok}`")))?;
    Ok(Skill { kind, level })
}

fn parse_count(value: &str, line: usize) -> Result<usize, MsrcpspError> {
    value.trim().parse().map_err(|_| err(line, format!("expected a count, found `{}`", value.trim())))
}

pub fn parse_instance(name: &str, text: &str) -> Result<MsrcpspInstance, MsrcpspError> {
    let mut section = Section::Header;
    let mut declared_tasks = None;
    let mut declared_resources = None;
    let mut declared_relations = None;
    let mut declared_skills = None;
    let mut project_name = None;
    let mut resources = Vec::new();
    let mut tasks = Vec::new();
    let mut saw_task_section = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.chars().all(|c| c == '=' || c == '-') {
            continue;
        }
        let lower = line.to_ascii_lowercase();
        if lower.starts_with("resourceid") {
            section = Section::Resources;
            continue;
        }
        if lower.starts_with("taskid") {
            section = Section::Tasks;
            saw_task_section = true;
            continue;
        }

        match section {
            Section::Header => {
                let (key, value) =
                    line.split_once(':').ok_or_else(|| err(line_no, format!("unexpected header line `{line}`")))?;
                match key.trim().to_ascii_lowercase().as_str() {
                    "tasks" => declared_tasks = Some(parse_count(value, line_no)?),
                    "resources" => declared_resources = Some(parse_count(value, line_no)?),
                    "precedence relations" => declared_relations = Some(parse_count(value, line_no)?),
                    "number of skill types" => declared_skills = Some(parse_count(value, line_no)?),
                    "project name" => project_name = Some(value.trim().to_string()),
                    _ => {}
                }
            }
            Section::Resources => {
                let toks = tokens(line);
                if toks.len() < 3 {
                    return Err(err(line_no, "resource line needs an id, a salary and at least one skill"));
                }
                let id: u32 = toks[0].parse().map_err(|_| err(line_no, format!("bad resource id `{}`", toks[0])))?;
                let salary: f64 =
                    toks[1].parse().map_err(|_| err(line_no, format!("bad salary `{}`", toks[1])))?;
                let skills = toks[2..].iter().map(|t| parse_skill(t, line_no)).collect::<Result<Vec<_>, _>>()?;
                resources.push(Resource { id, salary, skills });
            }
            Section::Tasks => {
                let toks = tokens(line);
                if toks.len() < 3 {
                    return Err(err(line_no, "task line needs an id, a duration and a skill"));
                }
                let id: u32 = toks[0].parse().map_err(|_| err(line_no, format!("bad task id `{}`", toks[0])))?;
                let duration: u64 =
                    toks[1].parse().map_err(|_| err(line_no, format!("bad duration `{}`", toks[1])))?;
                let mut skills = Vec::new();
                let mut predecessors = Vec::new();
                for t in &toks[2..] {
                    if t.contains(':') {
                        if !predecessors.is_empty() {
                            return Err(err(line_no, "skills must precede predecessor ids"));
                        }
                        skills.push(parse_skill(t, line_no)?);
                    } else {
                        predecessors
                            .push(t.parse().map_err(|_| err(line_no, format!("bad predecessor id `{t}`")))?);
                    }
                }
                if skills.len() != 1 {
                    return Err(err(line_no, format!("task requires exactly one skill, found {}", skills.len())));
                }
                tasks.push(Task { id, duration, skill: skills[0], predecessors });
            }
        }
    }

    let declared_tasks = declared_tasks.ok_or_else(|| err(0, "missing `Tasks:` header"))?;
    let declared_resources = declared_resources.ok_or_else(|| err(0, "missing `Resources:` header"))?;
    if !saw_task_section || tasks.is_empty() {
        return Err(err(0, "task section is missing or empty"));
    }
    if tasks.len() != declared_tasks {
        return Err(err(0, format!("header declares {declared_tasks} tasks, found {}", tasks.len())));
    }
    if resources.len() != declared_resources {
        return Err(err(0, format!("header declares {declared_resources} resources, found {}", resources.len())));
    }

    let name = project_name.unwrap_or_else(|| name.to_string());
    let instance = MsrcpspInstance::new(name, tasks, resources, declared_skills)?;
    if let Some(rel) = declared_relations {
        // some published files count relations differently; not fatal
        if rel != instance.precedence_relations() {
            log::warn!(
                "{}: header declares {rel} precedence relations, found {}",
                instance.name(),
                instance.precedence_relations()
            );
        }
    }
    Ok(instance)
}

pub fn serialize_instance(instance: &MsrcpspInstance) -> String {
    let mut out = String::new();
    let rule = "=".repeat(60);
    let _ = writeln!(out, "Project name:            {}", instance.name());
    let _ = writeln!(out, "Tasks:                   {}", instance.task_count());
    let _ = writeln!(out, "Resources:               {}", instance.resource_count());
    let _ = writeln!(out, "Precedence relations:    {}", instance.precedence_relations());
    let _ = writeln!(out, "Number of skill types:   {}", instance.skill_types());
    let _ = writeln!(out, "{rule}");
    let _ = writeln!(out, "ResourceID     Salary     Skills");
    for r in instance.resources() {
        let _ = write!(out, "{}     {}", r.id, r.salary);
        for s in &r.skills {
            let _ = write!(out, "     Q{}: {}", s.kind, s.level);
        }
        out.push('\n');
    }
    let _ = writeln!(out, "{rule}");
    let _ = writeln!(out, "TaskID     Duration     Skills     Predecessors");
    for t in instance.tasks() {
        let _ = write!(out, "{}     {}     Q{}: {}", t.id, t.duration, t.skill.kind, t.skill.level);
        for p in &t.predecessors {
            let _ = write!(out, "     {p}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "{rule}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
# three tasks, two resources
Project name: small
Tasks: 3
Resources: 2
Precedence relations: 2
Number of skill types: 2
==========
ResourceID Salary Skills
1 10.5 Q0: 2 Q1:1
2 20 Q0: 3
==========
TaskID Duration Skills Predecessors
1 4 Q0: 1
2 3 Q1: 1 1
3 5 Q0: 3 1
";

    #[test]
    fn parses_small_instance() {
        let inst = parse_instance("fallback", SMALL).unwrap();
        assert_eq!(inst.name(), "small");
        assert_eq!(inst.task_count(), 3);
        assert_eq!(inst.resource_count(), 2);
        assert_eq!(inst.resources()[0].skills.len(), 2);
        assert_eq!(inst.tasks()[1].predecessors, vec![1]);
        assert_eq!(inst.capable(2), &[1]);
    }

    #[test]
    fn round_trip() {
        let inst = parse_instance("x", SMALL).unwrap();
        let again = parse_instance("x", &serialize_instance(&inst)).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn empty_task_section_fails() {
        let text = "Tasks: 0\nResources: 1\n===\nResourceID Salary Skills\n1 1 Q0: 1\n===\nTaskID Duration Skills\n";
        assert!(matches!(parse_instance("x", text), Err(MsrcpspError::Parse { .. })));
    }

    #[test]
    fn reports_line_numbers() {
        let text = SMALL.replace("2 3 Q1: 1 1", "2 three Q1: 1 1");
        match parse_instance("x", &text) {
            Err(MsrcpspError::Parse { line, .. }) => assert_eq!(line, 14),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn count_mismatch_fails() {
        let text = SMALL.replace("Tasks: 3", "Tasks: 4");
        assert!(parse_instance("x", &text).is_err());
        let text = SMALL.replace("Resources: 2", "Resources: 3");
        assert!(parse_instance("x", &text).is_err());
    }

    #[test]
    fn cyclic_precedence_fails() {
        let text = SMALL.replace("1 4 Q0: 1", "1 4 Q0: 1 3").replace("relations: 2", "relations: 3");
        assert!(matches!(parse_instance("x", &text), Err(MsrcpspError::Cycle(_))));
    }
}
