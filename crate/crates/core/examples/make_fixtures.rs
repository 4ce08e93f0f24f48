//! Regenerates the instance files under `fixtures/`.
//!
//! The MS-RCPSP files are synthetic stand-ins shaped like the small iMOPSE
//! sets (100 tasks, 5 resources, given precedence and skill-type counts).
//! The TTP files are a 51-city layout with 50 generated items and a tiny
//! 5-city instance small enough to enumerate.
//!
//!     cargo run -p bntga-core --example make_fixtures -- fixtures

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use bntga_core::msrcpsp::{serialize_instance, MsrcpspInstance, Resource, Skill, Task};
use bntga_core::ttp::{serialize_ttp, DistanceKind, Item, TtpInstance};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EIL51: [(f64, f64); 51] = [
    (37., 52.), (49., 49.), (52., 64.), (20., 26.), (40., 30.), (21., 47.), (17., 63.), (31., 62.), (52., 33.),
    (51., 21.), (42., 41.), (31., 32.), (5., 25.), (12., 42.), (36., 16.), (52., 41.), (27., 23.), (17., 33.),
    (13., 13.), (57., 58.), (62., 42.), (42., 57.), (16., 57.), (8., 52.), (7., 38.), (27., 68.), (30., 48.),
    (43., 67.), (58., 48.), (58., 27.), (37., 69.), (38., 46.), (46., 10.), (61., 33.), (62., 63.), (63., 69.),
    (32., 22.), (45., 35.), (59., 15.), (5., 6.), (10., 17.), (21., 10.), (5., 64.), (30., 15.), (39., 10.),
    (32., 39.), (25., 32.), (25., 55.), (48., 28.), (56., 37.), (30., 40.),
];

fn msrcpsp(name: &str, tasks: u32, resources: u32, relations: usize, skill_types: u32, seed: u64) -> MsrcpspInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut res: Vec<Resource> = (1..=resources)
        .map(|id| {
            let salary = (rng.gen_range(100..=1000) as f64) / 10.0;
            let count = rng.gen_range(skill_types / 2..=skill_types * 3 / 4).max(1) as usize;
            let mut kinds: Vec<u32> = (0..skill_types).collect();
            kinds.shuffle(&mut rng);
            let mut skills: Vec<Skill> =
                kinds[..count].iter().map(|&kind| Skill { kind, level: rng.gen_range(1..=3) }).collect();
            skills.sort();
            Resource { id, salary, skills }
        })
        .collect();
    // every skill type is held by somebody
    for kind in 0..skill_types {
        if !res.iter().any(|r| r.level_in(kind).is_some()) {
            let slot = kind as usize % res.len();
            let r = &mut res[slot];
            r.skills.push(Skill { kind, level: rng.gen_range(1..=3) });
            r.skills.sort();
        }
    }

    let mut edges = BTreeSet::new();
    while edges.len() < relations {
        let a = rng.gen_range(1..tasks);
        let b = rng.gen_range(a + 1..=tasks);
        edges.insert((a, b));
    }
    let task_list = (1..=tasks)
        .map(|id| {
            let kind = rng.gen_range(0..skill_types);
            let best = res.iter().filter_map(|r| r.level_in(kind)).max().expect("type is covered");
            Task {
                id,
                duration: rng.gen_range(5..=60),
                skill: Skill { kind, level: rng.gen_range(1..=best.min(2)) },
                predecessors: edges.iter().filter(|e| e.1 == id).map(|e| e.0).collect(),
            }
        })
        .collect();
    MsrcpspInstance::new(name, task_list, res, Some(skill_types as usize)).expect("generated instance is valid")
}

fn eil51_n50() -> TtpInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    // one item per city except the depot, uncorrelated profit and weight
    let items: Vec<Item> = (1..51)
        .map(|city| Item { profit: rng.gen_range(1..=1000) as f64, weight: rng.gen_range(1..=1000) as f64, city })
        .collect();
    let total: f64 = items.iter().map(|i| i.weight).sum();
    TtpInstance::new("eil51-n50-synthetic", EIL51.to_vec(), DistanceKind::Ceil2d, items, (total / 4.0).round(), 0.1, 1.0, 0.25)
        .expect("valid")
        .with_data_type("uncorrelated (synthetic)")
}

fn tiny_ttp() -> TtpInstance {
    let coords = vec![(0.0, 0.0), (4.0, 0.0), (5.0, 3.0), (2.0, 5.0), (-1.0, 3.0)];
    let items = vec![
        Item { profit: 20.0, weight: 4.0, city: 1 },
        Item { profit: 35.0, weight: 6.0, city: 2 },
        Item { profit: 14.0, weight: 2.0, city: 3 },
        Item { profit: 28.0, weight: 5.0, city: 4 },
        Item { profit: 9.0, weight: 3.0, city: 2 },
    ];
    TtpInstance::new("tiny5", coords, DistanceKind::Exact, items, 12.0, 0.1, 1.0, 1.0)
        .expect("valid")
        .with_data_type("hand made")
}

fn write(dir: &Path, file: &str, header: &str, body: String) {
    let path = dir.join(file);
    std::fs::write(&path, format!("{header}{body}")).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    println!("wrote {}", path.display());
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    std::fs::create_dir_all(&dir).expect("create output directory");
    let note = "# synthetic instance in the iMOPSE layout, generated by make_fixtures\n";
    for (name, relations, types, seed) in [("100_5_22_15", 22, 15, 1), ("100_5_46_15", 46, 15, 2), ("100_5_48_9", 48, 9, 3)] {
        write(&dir, &format!("{name}.def"), note, serialize_instance(&msrcpsp(name, 100, 5, relations, types, seed)));
    }
    write(&dir, "10_3_small.def", note, serialize_instance(&msrcpsp("10_3_small", 10, 3, 8, 3, 4)));
    write(&dir, "5_2_tiny.def", note, serialize_instance(&msrcpsp("5_2_tiny", 5, 2, 3, 1, 6)));
    write(&dir, "eil51_n50.ttp", "", serialize_ttp(&eil51_n50()));
    write(&dir, "tiny5.ttp", "", serialize_ttp(&tiny_ttp()));
}
