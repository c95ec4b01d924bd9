//! End-to-end drive of the embedder public API: build a Chimera patch,
//! generate cell candidates for two overlapping constraint blocks, place
//! and route them, validate the result, then search for the minimal
//! chain cap of a standalone routing instance.

use embedder::{
    cell_candidates, optimal_route_search, rip_up_and_replace, validate_embedding,
    CellFootprint, ConstraintSpec, PlaceParams, TerminalSets,
};
use ising_core::{chimera, ChimeraCoord};
use std::collections::BTreeSet;

fn main() {
    // 2x2 Chimera with 4-qubit shores: 32 vertices.
    let hw = chimera(2, 2, 4, &[]).expect("chimera graph");
    let g = hw.graph();
    println!(
        "hardware: {} vertices, {} edges",
        g.num_vertices(),
        g.edges().count()
    );

    // Two 3-variable constraint blocks sharing variable 2, each occupying
    // three shore-0 slots of one cell.
    let fp = |vars: [u32; 3]| CellFootprint {
        slots: vec![(0, 0), (0, 1), (0, 2)],
        assignment: vars
            .iter()
            .enumerate()
            .map(|(i, &x)| (x, (0, i as u32)))
            .collect(),
    };
    let specs = vec![
        ConstraintSpec {
            vars: vec![0, 1, 2],
            candidates: cell_candidates(&hw, &fp([0, 1, 2])),
        },
        ConstraintSpec {
            vars: vec![2, 3, 4],
            candidates: cell_candidates(&hw, &fp([2, 3, 4])),
        },
    ];
    println!(
        "candidates per block: {} / {}",
        specs[0].candidates.len(),
        specs[1].candidates.len()
    );

    let out = rip_up_and_replace(g, &specs, PlaceParams::default(), 7)
        .expect("placement succeeds");
    println!(
        "placed in {} iterations; {} qubits, max chain {}",
        out.iterations,
        out.embedding.qubit_total(),
        out.embedding.max_chain()
    );
    let scopes: Vec<Vec<u32>> = specs.iter().map(|s| s.vars.clone()).collect();
    let report = validate_embedding(g, &scopes, &out.embedding);
    println!(
        "validation: {}",
        if report.is_valid() { "ok" } else { "FAILED" }
    );
    for line in out.embedding.to_text().lines() {
        println!("  {line}");
    }
    assert!(report.is_valid(), "embedding must validate: {:?}", report.violations);

    // Standalone router: one variable whose chain must connect opposite
    // corners of the patch; report the certified minimal chain cap.
    let u = hw.index(ChimeraCoord { row: 0, col: 0, shore: 0, k: 0 });
    let v = hw.index(ChimeraCoord { row: 1, col: 1, shore: 1, k: 3 });
    let ts = TerminalSets::new(vec![BTreeSet::from([u, v])]).unwrap();
    let search = optimal_route_search(g, &ts, 11).expect("search runs");
    println!(
        "corner-to-corner route: certified lower bound {}, achieved max chain {:?}",
        search.certified_lower, search.max_chain
    );
    let chains = search.chains.expect("route succeeds");
    let occupied: BTreeSet<u32> = chains.values().flatten().copied().collect();
    let total: usize = chains.values().map(BTreeSet::len).sum();
    assert_eq!(occupied.len(), total, "chains must be vertex-disjoint");
    println!("done");
}
