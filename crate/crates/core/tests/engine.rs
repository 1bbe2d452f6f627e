use neuroevo::engine::{
    epnet_step, replace, Checkpoint, Encoding, EpnetPath, Evolution, EvolutionConfig, Individual,
    StopReason, StructuralOp,
};
use neuroevo::genome::Genome;
use neuroevo::harness::{parity, xor};
use neuroevo::rng::seeded;
use neuroevo::Error;

fn individual(id: u64, error: f64) -> Individual {
    let genome = Genome::Genelist(neuroevo::genome::GeneListGenome::minimal(1, 1, &mut seeded(id)));
    Individual { id, genome, error, success: None, lineage: vec![] }
}

fn quick_matrix(seed: u64) -> EvolutionConfig {
    let mut c = EvolutionConfig::new(Encoding::Matrix, 6, 10, seed);
    c.trainer.epochs = 10;
    c.trainer.sa.steps_per_temperature = 3;
    c
}

#[test]
fn genelist_init_is_minimal() {
    let mut c = EvolutionConfig::new(Encoding::Genelist, 10, 1, 3);
    c.trainer.epochs = 0;
    let evo = Evolution::new(c, &xor()).unwrap();
    let pop = evo.population();
    assert_eq!(pop.len(), 10);
    let shape = |g: &Genome| match g {
        Genome::Genelist(g) => g
            .connections
            .iter()
            .map(|c| (c.in_id, c.out_id, c.innovation, c.enabled))
            .collect::<Vec<_>>(),
        _ => panic!("expected gene lists"),
    };
    let first = shape(&pop[0].genome);
    // two inputs plus bias, one output
    assert_eq!(first.len(), 3);
    assert!(pop.iter().all(|i| shape(&i.genome) == first && i.genome.hidden_count() == 0));
    assert!(pop.windows(2).any(|w| w[0].genome != w[1].genome));
}

#[test]
fn matrix_init_marks_every_individual() {
    let evo = Evolution::new(quick_matrix(4), &parity(3).unwrap()).unwrap();
    assert!(evo.population().iter().all(|i| i.success.is_some()));
}

#[test]
fn init_is_deterministic() {
    for encoding in [Encoding::Matrix, Encoding::Genelist, Encoding::Bitstring] {
        let mut c = EvolutionConfig::new(encoding, 6, 1, 11);
        c.trainer.epochs = 5;
        let a = Evolution::new(c.clone(), &xor()).unwrap();
        let b = Evolution::new(c, &xor()).unwrap();
        assert_eq!(a.population(), b.population());
    }
}

#[test]
fn success_parent_only_moves_weights() {
    let evo = Evolution::new(quick_matrix(5), &parity(3).unwrap()).unwrap();
    let ctx = evo.context();
    let mut parent = evo.population()[0].clone();
    parent.success = Some(true);
    let (child, trace) = epnet_step(&parent, 99, &ctx, &mut seeded(1)).unwrap();
    assert_eq!(trace.path, EpnetPath::Train);
    assert!(trace.attempts.is_empty());
    let (Genome::Matrix(a), Genome::Matrix(b)) = (&parent.genome, &child.genome) else { unreachable!() };
    assert_eq!(a.connections(), b.connections());
    assert_eq!(a.hidden_exists, b.hidden_exists);
    assert_eq!(child.lineage, vec![parent.id]);
}

#[test]
fn annealing_success_keeps_structure() {
    let evo = Evolution::new(quick_matrix(6), &parity(3).unwrap()).unwrap();
    let ctx = evo.context();
    let mut found = false;
    'outer: for parent in evo.population() {
        let mut parent = parent.clone();
        parent.success = Some(false);
        for seed in 0..20 {
            let (child, trace) = epnet_step(&parent, 100, &ctx, &mut seeded(seed)).unwrap();
            if trace.path == EpnetPath::Anneal {
                assert_eq!(child.success, Some(true));
                assert!(child.error < parent.error);
                let (Genome::Matrix(a), Genome::Matrix(b)) = (&parent.genome, &child.genome) else {
                    unreachable!()
                };
                assert_eq!(a.connections(), b.connections());
                assert_eq!(a.hidden_exists, b.hidden_exists);
                found = true;
                break 'outer;
            }
        }
    }
    assert!(found, "no annealing success observed");
}

#[test]
fn structural_path_deletes_before_adding() {
    let mut c = quick_matrix(7);
    // annealing that cannot move the weights
    c.trainer.sa.proposal_sigma = 1e-300;
    let evo = Evolution::new(c, &parity(3).unwrap()).unwrap();
    let ctx = evo.context();
    let mut attempts = 0;
    for (k, parent) in evo.population().iter().enumerate() {
        let mut parent = parent.clone();
        parent.success = Some(false);
        let (child, trace) = epnet_step(&parent, 200 + k as u64, &ctx, &mut seeded(k as u64)).unwrap();
        assert_eq!(trace.path, EpnetPath::Structural);
        assert!(trace.order_respected());
        assert_eq!(trace.visited.first(), Some(&StructuralOp::DeleteNeurons));
        if let Some(first_add) = trace.attempts.iter().position(|a| !a.op.is_deletion()) {
            assert!(trace.attempts[first_add..].iter().all(|a| !a.op.is_deletion()));
        }
        if let Some(a) = trace.attempts.iter().find(|a| a.accepted) {
            assert!(a.error_after < parent.error);
            assert_eq!(child.error, a.error_after);
        }
        attempts += trace.attempts.len();
        child.genome.validate().unwrap();
    }
    assert!(attempts > 0);
}

#[test]
fn target_met_at_init_stops_at_generation_zero() {
    let mut c = EvolutionConfig::new(Encoding::Bitstring, 4, 50, 1);
    c.stop.target_error = Some(1e9);
    let mut evo = Evolution::new(c, &xor()).unwrap();
    assert_eq!(evo.run().unwrap(), StopReason::TargetReached);
    assert_eq!(evo.generation(), 0);
    assert_eq!(evo.history().len(), 1);
}

#[test]
fn replacement_examples() {
    let mut pop = vec![individual(0, 0.1), individual(1, 0.2), individual(2, 0.3)];
    let before = pop.clone();
    assert_eq!(replace(&mut pop, vec![individual(3, 0.5)]), 0);
    assert_eq!(pop, before);
    // equal to the worst is not an improvement
    assert_eq!(replace(&mut pop, vec![individual(4, 0.3)]), 0);

    assert_eq!(replace(&mut pop, vec![individual(5, 0.15)]), 1);
    assert_eq!(pop.len(), 3);
    let ids: Vec<u64> = pop.iter().map(|i| i.id).collect();
    assert_eq!(ids, vec![0, 1, 5]);
}

#[test]
fn population_size_is_conserved_and_best_is_monotone() {
    let mut c = EvolutionConfig::new(Encoding::Bitstring, 8, 1000, 21);
    c.stop.stagnation_window = 2000;
    let mut evo = Evolution::new(c, &xor()).unwrap();
    assert_eq!(evo.run().unwrap(), StopReason::MaxGenerations);
    assert_eq!(evo.generation(), 1000);
    assert_eq!(evo.population().len(), 8);
    let h = evo.history();
    assert_eq!(h.len(), 1001);
    assert!(h.windows(2).all(|w| w[1].best <= w[0].best));
    assert!(h.iter().all(|r| r.best <= r.mean && r.mean <= r.worst));
    assert!(evo.population().iter().all(|i| i.genome.validate().is_ok()));
}

#[test]
fn every_generation_keeps_valid_genomes() {
    let mut c = quick_matrix(8);
    c.max_generations = 5;
    let mut evo = Evolution::new(c, &parity(3).unwrap()).unwrap();
    for _ in 0..5 {
        evo.step().unwrap();
        assert_eq!(evo.population().len(), 6);
        for ind in evo.population() {
            ind.genome.validate().unwrap();
            assert!(ind.error.is_finite());
        }
        assert!(evo.last_traces().iter().all(|t| t.order_respected()));
    }

    let mut c = EvolutionConfig::new(Encoding::Genelist, 6, 10, 9);
    c.trainer.epochs = 5;
    let mut evo = Evolution::new(c, &xor()).unwrap();
    for _ in 0..10 {
        evo.step().unwrap();
        let registry = evo.registry().unwrap();
        for ind in evo.population() {
            ind.genome.validate().unwrap();
            let Genome::Genelist(g) = &ind.genome else { unreachable!() };
            assert!(registry.covers(g));
        }
    }
}

#[test]
fn replay_is_bit_identical() {
    for encoding in [Encoding::Bitstring, Encoding::Genelist, Encoding::Matrix] {
        let mut c = EvolutionConfig::new(encoding, 6, 8, 31);
        c.trainer.epochs = 5;
        c.trainer.sa.steps_per_temperature = 2;
        let run = || {
            let mut evo = Evolution::new(c.clone(), &xor()).unwrap();
            evo.run().unwrap();
            (evo.history().to_vec(), evo.population().to_vec())
        };
        assert_eq!(run(), run(), "{encoding:?}");
    }
}

#[test]
fn checkpoint_resume_matches_uninterrupted_run() {
    let mut c = EvolutionConfig::new(Encoding::Genelist, 6, 12, 41);
    c.trainer.epochs = 5;
    let data = xor();
    let mut whole = Evolution::new(c.clone(), &data).unwrap();
    whole.run().unwrap();

    let mut first = Evolution::new(c, &data).unwrap();
    for _ in 0..5 {
        first.step().unwrap();
    }
    let text = serde_json::to_string(&first.checkpoint()).unwrap();
    let cp: Checkpoint = serde_json::from_str(&text).unwrap();
    let mut resumed = Evolution::resume(cp, &data).unwrap();
    resumed.run().unwrap();
    assert_eq!(resumed.history(), whole.history());
    assert_eq!(resumed.population(), whole.population());
}

#[test]
fn stagnation_stops_the_run() {
    let mut c = EvolutionConfig::new(Encoding::Bitstring, 4, 10_000, 2);
    c.stop.stagnation_window = 5;
    c.stop.min_improvement = f64::INFINITY;
    let mut evo = Evolution::new(c, &xor()).unwrap();
    assert_eq!(evo.run().unwrap(), StopReason::Stagnation);
    // the window spans generations 0..=5
    assert_eq!(evo.generation(), 5);
}

#[test]
fn invalid_configs_are_reported() {
    let c = EvolutionConfig::new(Encoding::Matrix, 1, 0, 0);
    let Err(Error::Config(v)) = Evolution::new(c, &xor()) else { panic!("expected a config error") };
    assert!(v.iter().any(|m| m == "population_size must be ≥ 2"));
    assert!(v.iter().any(|m| m == "max_generations must be ≥ 1"));
}
