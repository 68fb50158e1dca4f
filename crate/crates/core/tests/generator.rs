use std::path::PathBuf;

use hsa_core::flatten::flatten;
use hsa_core::gen::{generate_model, GenParams};
use hsa_core::hier::decompose_system;
use hsa_core::model::ModelKind;
use hsa_core::parse::{parse_model, to_json};
use hsa_core::system::EquationSystem;

fn golden_params() -> GenParams {
    GenParams {
        n_per_component: 50,
        k: 4,
        r: 0.1,
        c0: 6.0,
        levels: 2,
        seed: 7,
        ..GenParams::default()
    }
}

/// Set `HSA_UPDATE_GOLDEN=1` to rewrite the file after an intended change.
#[test]
fn seeded_model_matches_golden_file() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/golden_gen.json");
    let got = to_json(&generate_model(&golden_params()).unwrap().registry);
    if std::env::var_os("HSA_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &got).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap();
    assert_eq!(got, want);
    parse_model(&want).unwrap();
}

#[test]
fn square_nlae_components_have_nothing_to_export() {
    for seed in 0..10 {
        let g = generate_model(&GenParams {
            r: 0.0,
            seed,
            n_per_component: 24,
            ..GenParams::default()
        })
        .unwrap();
        for c in &g.registry.root_def().components {
            let def = &g.registry.defs[&c.def_name];
            let sys = EquationSystem::from_flat(&flatten(def, &g.registry));
            let d = decompose_system(&def.name, &sys, 20).unwrap();
            assert!(d.under_vars.is_empty() && d.under_eqs.is_empty(), "seed {seed}");
            assert!(d.over_empty());
        }
    }
}

#[test]
fn components_are_over_free() {
    for kind in [ModelKind::Nlae, ModelKind::Dae] {
        for seed in 0..20 {
            let g = generate_model(&GenParams {
                kind,
                seed,
                levels: 2,
                n_per_component: 20,
                r: 0.2,
                ..GenParams::default()
            })
            .unwrap();
            for (name, def) in &g.registry.defs {
                if *name == g.registry.root {
                    continue;
                }
                let sys = EquationSystem::from_flat(&flatten(def, &g.registry));
                let d = decompose_system(name, &sys, 20).unwrap();
                assert!(d.over_empty(), "{kind} seed {seed} {name}: {:?}", d.over_equations);
            }
        }
    }
}
