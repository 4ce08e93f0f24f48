use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::MsrcpspError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Skill {
    pub kind: u32,
    pub level: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resource {
    pub id: u32,
    pub salary: f64,
    pub skills: Vec<Skill>,
}

impl Resource {
    /// Level held in `kind`, if the resource has that skill at all.
    pub fn level_in(&self, kind: u32) -> Option<u32> {
        self.skills.iter().filter(|s| s.kind == kind).map(|s| s.level).max()
    }

    pub fn can_perform(&self, required: Skill) -> bool {
        self.level_in(required.kind).is_some_and(|l| l >= required.level)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: u32,
    pub duration: u64,
    pub skill: Skill,
    /// Predecessor task ids as written in the instance file.
    pub predecessors: Vec<u32>,
}

/// A validated instance: non-negative salaries, non-empty skill sets, an
/// acyclic precedence graph and at least one capable resource per task.
#[derive(Clone, Debug, PartialEq)]
pub struct MsrcpspInstance {
    name: String,
    tasks: Vec<Task>,
    resources: Vec<Resource>,
    skill_types: usize,
    predecessors: Vec<Vec<usize>>,
    successors: Vec<Vec<usize>>,
    capable: Vec<Vec<usize>>,
    processing_order: Vec<usize>,
}

impl MsrcpspInstance {
    pub fn new(
        name: impl Into<String>,
        tasks: Vec<Task>,
        resources: Vec<Resource>,
        skill_types: Option<usize>,
    ) -> Result<Self, MsrcpspError> {
        if tasks.is_empty() {
            return Err(MsrcpspError::NoTasks);
        }
        if resources.is_empty() {
            return Err(MsrcpspError::NoResources);
        }
        for r in &resources {
            if !r.salary.is_finite() || r.salary < 0.0 {
                return Err(MsrcpspError::BadResource { resource: r.id, message: "salary must be non-negative".into() });
            }
            if r.skills.is_empty() {
                return Err(MsrcpspError::BadResource { resource: r.id, message: "skill set is empty".into() });
            }
        }

        let mut index_of = HashMap::with_capacity(tasks.len());
        for (i, t) in tasks.iter().enumerate() {
            if index_of.insert(t.id, i).is_some() {
                return Err(MsrcpspError::BadTask { task: t.id, message: "duplicate task id".into() });
            }
        }
        let mut predecessors = vec![Vec::new(); tasks.len()];
        let mut successors = vec![Vec::new(); tasks.len()];
        for (i, t) in tasks.iter().enumerate() {
            for p in &t.predecessors {
                let &j = index_of.get(p).ok_or_else(|| MsrcpspError::BadTask {
                    task: t.id,
                    message: format!("unknown predecessor {p}"),
                })?;
                if j == i {
                    return Err(MsrcpspError::Cycle(vec![t.id]));
                }
                if !predecessors[i].contains(&j) {
                    predecessors[i].push(j);
                    successors[j].push(i);
                }
            }
        }

        let capable: Vec<Vec<usize>> = tasks
            .iter()
            .map(|t| (0..resources.len()).filter(|&r| resources[r].can_perform(t.skill)).collect())
            .collect();
        if let Some(i) = capable.iter().position(Vec::is_empty) {
            return Err(MsrcpspError::NoCapableResource { task: tasks[i].id });
        }

        let processing_order = processing_order(&tasks, &predecessors, &successors)?;
        let skill_types = skill_types.unwrap_or_else(|| {
            let kinds: BTreeSet<u32> = resources
                .iter()
                .flat_map(|r| r.skills.iter().map(|s| s.kind))
                .chain(tasks.iter().map(|t| t.skill.kind))
                .collect();
            kinds.len()
        });

        Ok(Self {
            name: name.into(),
            tasks,
            resources,
            skill_types,
            predecessors,
            successors,
            capable,
            processing_order,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn resources(&self) -> &[Resource] {
        &self.resources
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    pub fn resource_count(&self) -> usize {
        self.resources.len()
    }

    pub fn skill_types(&self) -> usize {
        self.skill_types
    }

    /// Predecessor indices of task `i`.
    pub fn predecessors(&self, i: usize) -> &[usize] {
        &self.predecessors[i]
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.successors[i]
    }

    /// Indices of resources able to perform task `i`.
    pub fn capable(&self, i: usize) -> &[usize] {
        &self.capable[i]
    }

    pub fn precedence_relations(&self) -> usize {
        self.predecessors.iter().map(Vec::len).sum()
    }

    /// Order in which the schedule builder times the tasks.
    pub fn processing_order(&self) -> &[usize] {
        &self.processing_order
    }
}

/// Topological order; among ready tasks those with successors go first, then
/// lower index.
fn processing_order(
    tasks: &[Task],
    predecessors: &[Vec<usize>],
    successors: &[Vec<usize>],
) -> Result<Vec<usize>, MsrcpspError> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let n = tasks.len();
    let mut pending: Vec<usize> = predecessors.iter().map(Vec::len).collect();
    let key = |i: usize| Reverse((successors[i].is_empty(), i));
    let mut ready: BinaryHeap<_> = (0..n).filter(|&i| pending[i] == 0).map(key).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((_, i))) = ready.pop() {
        order.push(i);
        for &s in &successors[i] {
            pending[s] -= 1;
            if pending[s] == 0 {
                ready.push(key(s));
            }
        }
    }
    if order.len() < n {
        return Err(MsrcpspError::Cycle(find_cycle(tasks, predecessors, &pending)));
    }
    Ok(order)
}

/// Walks predecessor links among the unprocessed tasks until one repeats.
fn find_cycle(tasks: &[Task], predecessors: &[Vec<usize>], pending: &[usize]) -> Vec<u32> {
    let start = pending.iter().position(|&p| p > 0).expect("a blocked task exists");
    let mut path = vec![start];
    let mut current = start;
    loop {
        let next = *predecessors[current]
            .iter()
            .find(|&&p| pending[p] > 0)
            .expect("a blocked task has a blocked predecessor");
        if let Some(pos) = path.iter().position(|&t| t == next) {
            let mut cycle: Vec<u32> = path[pos..].iter().map(|&i| tasks[i].id).collect();
            cycle.reverse();
            return cycle;
        }
        path.push(next);
        current = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn task(id: u32, duration: u64, kind: u32, level: u32, preds: &[u32]) -> Task {
        Task { id, duration, skill: Skill { kind, level }, predecessors: preds.to_vec() }
    }

    fn worker(id: u32, salary: f64, skills: &[(u32, u32)]) -> Resource {
        Resource { id, salary, skills: skills.iter().map(|&(kind, level)| Skill { kind, level }).collect() }
    }

    #[test]
    fn capable_lists_respect_type_and_level() {
        let inst = MsrcpspInstance::new(
            "t",
            vec![task(1, 1, 0, 2, &[]), task(2, 1, 1, 0, &[])],
            vec![worker(1, 1.0, &[(0, 1), (1, 3)]), worker(2, 1.0, &[(0, 3)])],
            None,
        )
        .unwrap();
        assert_eq!(inst.capable(0), &[1]);
        assert_eq!(inst.capable(1), &[0]);
        assert_eq!(inst.skill_types(), 2);
    }

    #[test]
    fn rejects_invalid_instances() {
        let ok_res = vec![worker(1, 1.0, &[(0, 5)])];
        assert_eq!(MsrcpspInstance::new("t", vec![], ok_res.clone(), None), Err(MsrcpspError::NoTasks));
        assert!(matches!(
            MsrcpspInstance::new("t", vec![task(1, 1, 0, 0, &[])], vec![worker(1, -1.0, &[(0, 1)])], None),
            Err(MsrcpspError::BadResource { .. })
        ));
        assert!(matches!(
            MsrcpspInstance::new("t", vec![task(1, 1, 0, 0, &[])], vec![worker(1, 1.0, &[])], None),
            Err(MsrcpspError::BadResource { .. })
        ));
        assert_eq!(
            MsrcpspInstance::new("t", vec![task(1, 1, 3, 0, &[])], ok_res.clone(), None),
            Err(MsrcpspError::NoCapableResource { task: 1 })
        );
        assert!(matches!(
            MsrcpspInstance::new("t", vec![task(1, 1, 0, 0, &[9])], ok_res, None),
            Err(MsrcpspError::BadTask { task: 1, .. })
        ));
    }

    #[test]
    fn cycle_is_named() {
        let err = MsrcpspInstance::new(
            "t",
            vec![task(1, 1, 0, 0, &[]), task(2, 1, 0, 0, &[1, 4]), task(3, 1, 0, 0, &[2]), task(4, 1, 0, 0, &[3])],
            vec![worker(1, 1.0, &[(0, 1)])],
            None,
        )
        .unwrap_err();
        match err {
            MsrcpspError::Cycle(mut ids) => {
                ids.sort_unstable();
                assert_eq!(ids, vec![2, 3, 4]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn processing_order_prefers_tasks_with_successors() {
        // 1 and 2 are both ready; 2 has a successor so it goes first
        let inst = MsrcpspInstance::new(
            "t",
            vec![task(1, 1, 0, 0, &[]), task(2, 1, 0, 0, &[]), task(3, 1, 0, 0, &[2])],
            vec![worker(1, 1.0, &[(0, 1)])],
            None,
        )
        .unwrap();
        assert_eq!(inst.processing_order(), &[1, 0, 2]);
    }
}
