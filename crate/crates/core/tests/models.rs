use std::time::{Duration, Instant};

use bilinear_core::bilinear::{evaluate_objective, Assignment};
use bilinear_core::models::{
    compile_decmdp, evaluate_policy, extract_policy, oracle_enumerate, Agent, Choice, DecMdp, JointReward, Policy,
};
use bilinear_core::pipeline::{solve_program, PipelineConfig};
use bilinear_core::random::random_decmdp;
use bilinear_core::solver::SolverConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tight() -> PipelineConfig {
    PipelineConfig {
        solver: SolverConfig { epsilon: 1e-6, ..SolverConfig::default() },
        ..PipelineConfig::default()
    }
}

#[test]
fn solver_matches_policy_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for i in 0..50 {
        let m = random_decmdp(&mut rng, 5, 2);
        let p = compile_decmdp(&m).unwrap();
        let started = Instant::now();
        let r = solve_program(&p, &tight()).unwrap();
        assert!(started.elapsed() < Duration::from_secs(2), "#{i} took {:?}", started.elapsed());
        let (best, policy) = oracle_enumerate(&m).unwrap();
        assert!((r.value - best).abs() <= 1e-6 + r.bound, "#{i}: {} vs {best}", r.value);
        assert!(r.value <= best + 1e-7);
        assert!((evaluate_policy(&m, &policy).unwrap() - best).abs() < 1e-12);
        let extracted = extract_policy(&m, &r.assignment).unwrap();
        assert!(evaluate_policy(&m, &extracted).unwrap() <= best + 1e-9);
    }
}

/// Occupancies of a deterministic policy by forward propagation in state order.
fn occupancies(agent: &Agent, policy: &[Option<usize>]) -> Vec<f64> {
    let mut inflow = agent.initial.clone();
    let mut x = vec![0.0; agent.n_variables()];
    for s in 0..agent.states.len() {
        let Some(a) = policy[s] else { continue };
        let c = agent.choices[s].iter().find(|c| c.action == a).unwrap();
        x[agent.variable_index(s, a).unwrap()] = inflow[s];
        for &(t, p) in &c.next {
            inflow[t] += inflow[s] * p;
        }
    }
    x
}

fn random_policy(agent: &Agent, rng: &mut ChaCha8Rng) -> Vec<Option<usize>> {
    agent
        .choices
        .iter()
        .map(|cs| (!cs.is_empty()).then(|| cs[rng.random_range(0..cs.len())].action))
        .collect()
}

#[test]
fn policy_occupancies_are_feasible_and_priced_correctly() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..30 {
        let m = random_decmdp(&mut rng, 5, 2);
        let p = compile_decmdp(&m).unwrap();
        for _ in 0..5 {
            let policy = Policy {
                actions: [random_policy(&m.agents[0], &mut rng), random_policy(&m.agents[1], &mut rng)],
            };
            let a = Assignment {
                w: vec![],
                x: occupancies(&m.agents[0], &policy.actions[0]),
                y: occupancies(&m.agents[1], &policy.actions[1]),
                z: vec![],
            };
            assert!(p.is_feasible(&a, 1e-9));
            let value = evaluate_objective(&p, &a).unwrap();
            assert!((value - evaluate_policy(&m, &policy).unwrap()).abs() < 1e-9);
            assert_eq!(extract_policy(&m, &a).unwrap().actions[0].len(), m.agents[0].states.len());
        }
    }
}

fn line(len: usize, reward: f64) -> Agent {
    let mut choices: Vec<Vec<Choice>> = (0..len)
        .map(|s| vec![Choice { action: 0, reward: if s == 0 { reward } else { 0.0 }, next: vec![(s + 1, 1.0)] }])
        .collect();
    choices.push(Vec::new());
    let mut terminal = vec![false; len + 1];
    terminal[len] = true;
    let mut initial = vec![0.0; len + 1];
    initial[0] = 1.0;
    Agent {
        states: (0..=len).map(|s| format!("t{s}")).collect(),
        terminal,
        actions: vec!["go".into()],
        choices,
        initial,
    }
}

#[test]
fn joint_rewards_need_not_be_simultaneous() {
    // agent 1 acts at its first step, agent 2 at its third
    let m = DecMdp {
        agents: [line(1, 0.5), line(3, 0.0)],
        joint: vec![JointReward { state1: 0, action1: 0, state2: 2, action2: 0, value: 2.0 }],
    };
    let (best, _) = oracle_enumerate(&m).unwrap();
    assert!((best - 2.5).abs() < 1e-12);
    let r = solve_program(&compile_decmdp(&m).unwrap(), &tight()).unwrap();
    assert!((r.value - 2.5).abs() < 1e-9);
}

#[test]
fn joint_reward_scales_with_both_reach_probabilities() {
    let mut a1 = line(2, 0.0);
    a1.choices[0][0].next = vec![(1, 0.25), (2, 0.75)];
    let a2 = line(1, 0.0);
    let m = DecMdp {
        agents: [a1, a2],
        joint: vec![JointReward { state1: 1, action1: 0, state2: 0, action2: 0, value: 4.0 }],
    };
    let (best, _) = oracle_enumerate(&m).unwrap();
    assert!((best - 1.0).abs() < 1e-12);
}
