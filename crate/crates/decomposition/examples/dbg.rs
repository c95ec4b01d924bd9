use decomposition::*;
use ising_core::IsingModel;

fn main() {
    let mut model = IsingModel::new(5);
    for (i, h) in [0.3, -0.7, 0.2, 0.0, 0.5].iter().enumerate() {
        model.add_h(i as u32, *h).unwrap();
    }
    for (i, j, v) in [(0u32, 1u32, 0.8), (1, 2, -1.1), (2, 3, 0.6), (3, 4, -0.4), (0, 4, 0.9)] {
        model.add_j(i, j, v).unwrap();
    }
    let rg = RegionGraph::new(
        5,
        vec![RegionSpec { constraints: vec![], scope: (0..5).collect(), model, gap: 1.0 }],
        None,
    )
    .unwrap();
    let out = gbp_solve(&rg, &ExactSampler, 0.6, &GbpParams::default()).unwrap();
    println!("unary: {:?}", out.beliefs.unary.iter().map(|u| u[1]).collect::<Vec<_>>());
}
