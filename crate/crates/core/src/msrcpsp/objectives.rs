use crate::pareto::ObjectiveVector;
use crate::problem::ReferencePoints;

use super::instance::MsrcpspInstance;
use super::schedule::Schedule;
use super::ObjectiveMode;

/// Objective vector of a feasible schedule.
///
/// Component order: makespan, cost, then (five-objective mode) average cash
/// flow deviation, skill overuse and average deviation of resource use.
/// The two deviation objectives use absolute deviations; summing signed
/// deviations around a mean would always give zero.
pub fn evaluate_schedule(instance: &MsrcpspInstance, schedule: &Schedule, mode: ObjectiveMode) -> ObjectiveVector {
    let tasks = instance.tasks();
    let resources = instance.resources();
    let makespan = schedule.makespan();

    let cost: f64 = tasks
        .iter()
        .zip(&schedule.assignment)
        .map(|(t, &r)| resources[r].salary * t.duration as f64)
        .sum();

    if mode == ObjectiveMode::Two {
        return ObjectiveVector::new(vec![makespan as f64, cost]);
    }

    let skill_overuse: f64 = tasks
        .iter()
        .zip(&schedule.assignment)
        .map(|(t, &r)| {
            let held = resources[r].level_in(t.skill.kind).expect("feasible schedule");
            f64::from(held - t.skill.level)
        })
        .sum();

    let r = resources.len() as f64;
    let expected_use = tasks.len() as f64 / r;
    let mut use_count = vec![0usize; resources.len()];
    for &res in &schedule.assignment {
        use_count[res] += 1;
    }
    let resource_use = use_count.iter().map(|&c| (c as f64 - expected_use).abs()).sum::<f64>() / r;

    let cash_flow = if makespan == 0 {
        0.0
    } else {
        // slot t (1-based) covers the interval [t-1, t)
        let horizon = makespan as usize;
        let mut delta = vec![0.0f64; horizon + 1];
        for (t, &res) in schedule.assignment.iter().enumerate() {
            let (s, f) = (schedule.start[t] as usize, schedule.finish[t] as usize);
            if f > s {
                delta[s] += resources[res].salary;
                delta[f] -= resources[res].salary;
            }
        }
        let average = cost / makespan as f64;
        let mut running = 0.0;
        let mut deviation = 0.0;
        for d in delta.iter().take(horizon) {
            running += d;
            deviation += (running - average).abs();
        }
        deviation / makespan as f64
    };

    ObjectiveVector::new(vec![makespan as f64, cost, cash_flow, skill_overuse, resource_use])
}

/// Best and worst attainable value per objective, used for normalization.
pub fn reference_points(instance: &MsrcpspInstance, mode: ObjectiveMode) -> ReferencePoints {
    let tasks = instance.tasks();
    let resources = instance.resources();
    let n = tasks.len() as f64;
    let r = resources.len() as f64;
    let total_duration: f64 = tasks.iter().map(|t| t.duration as f64).sum();
    let min_duration = tasks.iter().map(|t| t.duration).min().unwrap_or(0) as f64;
    let min_salary = resources.iter().map(|r| r.salary).fold(f64::INFINITY, f64::min);
    let max_salary = resources.iter().map(|r| r.salary).fold(f64::NEG_INFINITY, f64::max);

    let best_makespan = min_duration * n / r;
    let best_cost = total_duration * min_salary;
    let worst_makespan = total_duration;
    let worst_cost = total_duration * max_salary;

    let mut perfect = vec![best_makespan, best_cost];
    let mut nadir = vec![worst_makespan, worst_cost];
    if mode == ObjectiveMode::Five {
        let worst_overuse: f64 = (0..tasks.len())
            .map(|t| {
                let req = tasks[t].skill;
                instance
                    .capable(t)
                    .iter()
                    .map(|&res| resources[res].level_in(req.kind).expect("capable") - req.level)
                    .max()
                    .map_or(0.0, f64::from)
            })
            .sum();
        let worst_use = worst_makespan * (r - 1.0) / r;
        perfect.extend([0.0, 0.0, 0.0]);
        nadir.extend([worst_cost, worst_overuse, worst_use]);
    }
    ReferencePoints { perfect, nadir }
}
