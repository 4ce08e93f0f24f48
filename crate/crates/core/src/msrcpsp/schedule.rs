use serde::{Deserialize, Serialize};

use super::instance::MsrcpspInstance;
use super::MsrcpspError;

/// A timetable: the assignment plus start/finish time of every task.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub assignment: Vec<usize>,
    pub start: Vec<u64>,
    pub finish: Vec<u64>,
}

impl Schedule {
    pub fn makespan(&self) -> u64 {
        self.finish.iter().copied().max().unwrap_or(0)
    }
}

/// Greedy schedule builder: in processing order, every task starts at the
/// later of its predecessors' latest finish and its resource's current finish.
pub fn build_schedule(instance: &MsrcpspInstance, genes: &[usize]) -> Result<Schedule, MsrcpspError> {
    let n = instance.task_count();
    if genes.len() != n {
        return Err(MsrcpspError::GenotypeLength { expected: n, found: genes.len() });
    }
    for (task, &resource) in genes.iter().enumerate() {
        if !instance.capable(task).contains(&resource) {
            return Err(MsrcpspError::InvalidGene { task, resource });
        }
    }

    let mut start = vec![0u64; n];
    let mut finish = vec![0u64; n];
    let mut resource_free = vec![0u64; instance.resource_count()];
    for &t in instance.processing_order() {
        let pred_end = instance.predecessors(t).iter().map(|&p| finish[p]).max().unwrap_or(0);
        let r = genes[t];
        let s = pred_end.max(resource_free[r]);
        start[t] = s;
        finish[t] = s + instance.tasks()[t].duration;
        resource_free[r] = finish[t];
    }
    Ok(Schedule { assignment: genes.to_vec(), start, finish })
}

/// A broken scheduling constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Wrong number of tasks in the schedule.
    Incomplete { expected: usize, found: usize },
    /// `finish - start` differs from the task duration.
    Duration { task: usize },
    /// Task starts before a predecessor finished.
    Precedence { task: usize, predecessor: usize },
    /// Resource lacks the required skill type or level.
    Skill { task: usize, resource: usize },
    /// Resource index does not exist.
    UnknownResource { task: usize, resource: usize },
    /// Two tasks overlap on the same resource.
    Overlap { resource: usize, first: usize, second: usize },
}

/// Checks a schedule against the model constraints directly, without reusing
/// any of the builder's bookkeeping.
pub fn check_schedule(instance: &MsrcpspInstance, schedule: &Schedule) -> Vec<Violation> {
    let n = instance.task_count();
    let mut violations = Vec::new();
    for len in [schedule.assignment.len(), schedule.start.len(), schedule.finish.len()] {
        if len != n {
            violations.push(Violation::Incomplete { expected: n, found: len });
            return violations;
        }
    }
    for (t, task) in instance.tasks().iter().enumerate() {
        if schedule.finish[t] < schedule.start[t] || schedule.finish[t] - schedule.start[t] != task.duration {
            violations.push(Violation::Duration { task: t });
        }
        for (p, other) in instance.tasks().iter().enumerate() {
            if task.predecessors.contains(&other.id) && schedule.finish[p] > schedule.start[t] {
                violations.push(Violation::Precedence { task: t, predecessor: p });
            }
        }
        let r = schedule.assignment[t];
        match instance.resources().get(r) {
            None => violations.push(Violation::UnknownResource { task: t, resource: r }),
            Some(res) => {
                let qualified = res.skills.iter().any(|s| s.kind == task.skill.kind && s.level >= task.skill.level);
                if !qualified {
                    violations.push(Violation::Skill { task: t, resource: r });
                }
            }
        }
    }
    // a resource works on at most one task in every unit time slot
    for a in 0..n {
        for b in (a + 1)..n {
            if schedule.assignment[a] != schedule.assignment[b] {
                continue;
            }
            let overlap = schedule.start[a] < schedule.finish[b] && schedule.start[b] < schedule.finish[a];
            if overlap {
                violations.push(Violation::Overlap { resource: schedule.assignment[a], first: a, second: b });
            }
        }
    }
    violations
}

/// Share of tasks with zero slack on a longest duration-weighted path of
/// the precedence graph (resource limits ignored).
pub fn critical_path_fraction(instance: &MsrcpspInstance) -> f64 {
    let n = instance.task_count();
    let order = instance.processing_order();
    let duration = |t: usize| instance.tasks()[t].duration;
    let mut earliest_finish = vec![0u64; n];
    for &t in order {
        let es = instance.predecessors(t).iter().map(|&p| earliest_finish[p]).max().unwrap_or(0);
        earliest_finish[t] = es + duration(t);
    }
    let horizon = earliest_finish.iter().copied().max().unwrap_or(0);
    let mut latest_start = vec![0u64; n];
    for &t in order.iter().rev() {
        let lf = instance.successors(t).iter().map(|&s| latest_start[s]).min().unwrap_or(horizon);
        latest_start[t] = lf - duration(t);
    }
    let critical = (0..n).filter(|&t| earliest_finish[t] - duration(t) == latest_start[t]).count();
    critical as f64 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::msrcpsp::instance::{Resource, Skill, Task};

    fn task(id: u32, duration: u64, preds: &[u32]) -> Task {
        Task { id, duration, skill: Skill { kind: 0, level: 1 }, predecessors: preds.to_vec() }
    }

    fn worker(id: u32, salary: f64) -> Resource {
        Resource { id, salary, skills: vec![Skill { kind: 0, level: 3 }] }
    }

    #[test]
    fn single_task() {
        let inst = MsrcpspInstance::new("t", vec![task(1, 5, &[])], vec![worker(1, 2.0)], None).unwrap();
        let s = build_schedule(&inst, &[0]).unwrap();
        assert_eq!((s.start[0], s.finish[0], s.makespan()), (0, 5, 5));
    }

    #[test]
    fn chain_on_distinct_resources() {
        let inst = MsrcpspInstance::new(
            "t",
            vec![task(1, 2, &[]), task(2, 3, &[1])],
            vec![worker(1, 1.0), worker(2, 1.0)],
            None,
        )
        .unwrap();
        let s = build_schedule(&inst, &[0, 1]).unwrap();
        assert_eq!(s.start[1], 2);
        assert_eq!(s.makespan(), 5);
        assert!(check_schedule(&inst, &s).is_empty());
    }

    #[test]
    fn shared_resource_serializes_tasks() {
        let inst = MsrcpspInstance::new("t", vec![task(1, 2, &[]), task(2, 3, &[])], vec![worker(1, 1.0)], None)
            .unwrap();
        let s = build_schedule(&inst, &[0, 0]).unwrap();
        assert_eq!(s.makespan(), 5);
        assert!(check_schedule(&inst, &s).is_empty());
    }

    #[test]
    fn invalid_genes_are_rejected() {
        let inst = MsrcpspInstance::new("t", vec![task(1, 2, &[])], vec![worker(1, 1.0)], None).unwrap();
        assert!(matches!(build_schedule(&inst, &[3]), Err(MsrcpspError::InvalidGene { .. })));
        assert!(matches!(build_schedule(&inst, &[0, 0]), Err(MsrcpspError::GenotypeLength { .. })));
    }

    #[test]
    fn validator_catches_violations() {
        let inst = MsrcpspInstance::new(
            "t",
            vec![task(1, 2, &[]), task(2, 3, &[1])],
            vec![worker(1, 1.0), worker(2, 1.0)],
            None,
        )
        .unwrap();
        let bad = Schedule { assignment: vec![0, 0], start: vec![0, 1], finish: vec![2, 4] };
        let v = check_schedule(&inst, &bad);
        assert!(v.contains(&Violation::Precedence { task: 1, predecessor: 0 }));
        assert!(v.contains(&Violation::Overlap { resource: 0, first: 0, second: 1 }));
    }

    #[test]
    fn critical_path_of_diamond() {
        // 1 -> {2 (long), 3 (short)} -> 4 : tasks 1,2,4 are critical
        let inst = MsrcpspInstance::new(
            "t",
            vec![task(1, 1, &[]), task(2, 5, &[1]), task(3, 1, &[1]), task(4, 1, &[2, 3])],
            vec![worker(1, 1.0)],
            None,
        )
        .unwrap();
        assert_eq!(critical_path_fraction(&inst), 0.75);
    }
}
