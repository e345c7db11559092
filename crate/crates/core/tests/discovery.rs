mod common;

use std::collections::BTreeMap;

use common::*;
use ugt_core::discovery::*;
use ugt_core::format::game_hash;
use ugt_core::rational::{one, Q};
use ugt_core::strategy::*;
use ugt_core::{serialize, Error, Game};

fn efr_pure(g: &Game, first: &str) -> Vec<PureStrategy> {
    let p1 = pure_from_names(g, 1, &[("T.root", first)]).unwrap();
    let p2 = pure_from_names(g, 2, &[("Tbar.d", "m2"), ("T.d", "r2")]).unwrap();
    vec![vec![], p1, p2]
}

fn half() -> Q {
    Q::new(1.into(), 2.into())
}

fn mixed_driver(g: &Game) -> Driver {
    let p = efr_pure(g, "l1");
    let q = efr_pure(g, "r1");
    let entries = BTreeMap::from([(
        game_hash(g),
        vec![vec![], vec![(p[1].clone(), half()), (q[1].clone(), half())], vec![(p[2].clone(), one())]],
    )]);
    Driver::new(Policy::Table { entries, fallback: Box::new(Policy::EfrLexFirst) })
}

#[test]
fn awareness_trees_on_ex1() {
    let g = fixture("ex1.ugt");
    assert_eq!(awareness_tree(&g, &efr_pure(&g, "l1"), 1).unwrap(), tree(&g, "Tbar"));
    assert_eq!(awareness_tree(&g, &efr_pure(&g, "r1"), 1).unwrap(), tree(&g, "T"));
    let s = fixture("std1.ugt");
    for p in pure_profiles(&s) {
        for i in s.players() {
            assert_eq!(awareness_tree(&s, &p, i).unwrap(), 0);
        }
    }
}

#[test]
fn ex1_discovered_matches_golden_file() {
    let g = fixture("ex1.ugt");
    let d = discovered_version(&g, &efr_pure(&g, "l1")).unwrap();
    let golden = fixture("ex1_discovered.ugt");
    assert_eq!(d, golden);
    assert_eq!(serialize(&d), serialize(&golden));
    let root = node(&d, "Tbar.root");
    let h = d.infoset_of(root, 1).unwrap();
    assert_eq!(d.infoset(h).tree, tree(&d, "Tbar"));
    assert_eq!(d.infoset(h).members, vec![root]);
}

#[test]
fn ex1_right_path_discovers_nothing() {
    let g = fixture("ex1.ugt");
    let d = discovered_version(&g, &efr_pure(&g, "r1")).unwrap();
    assert_eq!(d, g);
    let h = d.infoset_of(node(&d, "Tbar.root"), 1).unwrap();
    assert_eq!(d.infoset(h).tree, tree(&d, "T"));
}

#[test]
fn single_tree_games_are_fixed() {
    for name in ["std1.ugt", "pennies.ugt"] {
        let g = fixture(name);
        for p in pure_profiles(&g) {
            assert_eq!(discovered_version(&g, &p).unwrap(), g);
        }
    }
}

#[test]
fn awareness_comparisons() {
    let g = fixture("ex1.ugt");
    let d = fixture("ex1_discovered.ugt");
    assert!(more_awareness(&g, &d).unwrap());
    assert!(more_awareness(&g, &g).unwrap());
    assert!(!more_awareness(&d, &g).unwrap());
    assert!(preserves_information(&g, &d).unwrap());
    assert!(preserves_information(&g, &g).unwrap());
    assert!(matches!(preserves_information(&d, &g), Err(Error::Precondition(_))));
    let s = fixture("std1.ugt");
    assert!(matches!(more_awareness(&g, &s), Err(Error::SkeletonMismatch(_))));
}

#[test]
fn merged_sets_break_information_preservation() {
    let base = fixture("ex1_discovered.ugt");
    let mut sets = base.assignment();
    let zl = node(&base, "Tbar.zl");
    let zr = node(&base, "Tbar.zr");
    sets.insert((1, zl), vec![zl, zr]);
    sets.insert((1, zr), vec![zl, zr]);
    let merged = base.with_infosets(&sets).unwrap();
    assert!(more_awareness(&base, &merged).unwrap());
    assert!(!preserves_information(&base, &merged).unwrap());
}

#[test]
fn transition_examples() {
    let g = fixture("ex1.ugt");
    let d = fixture("ex1_discovered.ugt");
    let lex = Driver::new(Policy::EfrLexFirst);
    let t = transition(&g, &lex).unwrap();
    assert_eq!(t.len(), 1);
    assert_eq!(t[0], (d.clone(), one()));
    let t = transition(&g, &mixed_driver(&g)).unwrap();
    assert_eq!(t.len(), 2);
    for (h, w) in &t {
        assert_eq!(*w, half());
        assert!(*h == g || *h == d);
    }
}

#[test]
fn absorbing_games() {
    let lex = Driver::new(Policy::EfrLexFirst);
    assert!(is_self_confirming_game(&fixture("ex1_discovered.ugt"), &lex).unwrap());
    assert!(!is_self_confirming_game(&fixture("ex1.ugt"), &lex).unwrap());
    for p in [Policy::EfrLexFirst, Policy::EfrLexLast, Policy::EfrUniform] {
        assert!(is_self_confirming_game(&fixture("std1.ugt"), &Driver::new(p)).unwrap());
    }
}

#[test]
fn runs_on_fixtures() {
    let g = fixture("ex1.ugt");
    let d = fixture("ex1_discovered.ugt");
    for seed in 0..4 {
        let t = run(&g, &Driver::new(Policy::EfrLexFirst), seed, 16).unwrap();
        assert_eq!(t.steps.len(), 1);
        assert!(t.absorbing);
        assert_eq!(*t.last(), d);
        assert_eq!(t.steps[0].successor_hash, game_hash(&d));
    }
    let s = fixture("std1.ugt");
    let t = run(&s, &Driver::new(Policy::EfrUniform), 3, 16).unwrap();
    assert!(t.steps.is_empty() && t.absorbing);
}

#[test]
fn mixed_run_absorbs_monotonically() {
    let g = fixture("ex1.ugt");
    let t = run(&g, &mixed_driver(&g), 7, 64).unwrap();
    assert!(t.absorbing);
    let changed = t.steps.iter().filter(|s| s.changed).count();
    assert!(changed <= 1);
    assert!(changed <= capacity_bound(&g));
    for w in t.games.windows(2) {
        assert!(more_awareness(&w[0], &w[1]).unwrap());
    }
    for (s, w) in t.steps.iter().zip(t.games.windows(2)) {
        assert_eq!(discovered_version(&w[0], &s.profile).unwrap(), w[1]);
    }
    let aware = t.steps.last().map(|s| t.games[0].trees[s.awareness[1]].name.clone());
    assert!(matches!(aware.as_deref(), None | Some("T") | Some("Tbar")));
}

#[test]
fn runs_are_seed_deterministic() {
    let g = fixture("ex1.ugt");
    let a = run(&g, &mixed_driver(&g), 11, 64).unwrap().to_json();
    let b = run(&g, &mixed_driver(&g), 11, 64).unwrap().to_json();
    assert_eq!(a, b);
    assert_eq!(a["schema"], "ugt.trace/1");
}

#[test]
fn exhausted_step_budget_is_an_error() {
    let g = fixture("ex1.ugt");
    assert!(matches!(run(&g, &Driver::new(Policy::EfrLexFirst), 0, 0), Err(Error::NotAbsorbed(0))));
}

#[test]
fn off_path_choices_do_not_matter() {
    let g = fixture("ex1.ugt");
    let base = discovered_version(&g, &efr_pure(&g, "l1")).unwrap();
    for p in pure_profiles(&g) {
        if path(&g, &p, 0) == path(&g, &efr_pure(&g, "l1"), 0) {
            assert_eq!(discovered_version(&g, &p).unwrap(), base);
        }
    }
}

#[test]
fn absorbing_game_is_idempotent_on_its_paths() {
    let d = fixture("ex1_discovered.ugt");
    for p in pure_profiles(&d) {
        let once = discovered_version(&d, &p).unwrap();
        assert_eq!(discovered_version(&once, &p).unwrap(), once);
    }
}

#[test]
fn pipeline_examples() {
    let opts = PipelineOptions::default();
    let g = fixture("ex1.ugt");
    let d = fixture("ex1_discovered.ugt");
    let r = pipeline(&g, Policy::EfrLexFirst, &opts).unwrap();
    assert_eq!(r.trace.steps.len(), 1);
    assert_eq!(*r.trace.last(), d);
    let expected = ugt_core::profile::parse_profile(&d, &fixture_text("ex1_discovered_rsce.json")).unwrap();
    assert_eq!(r.equilibrium, expected);

    let again = pipeline(&d, Policy::EfrLexFirst, &opts).unwrap();
    assert!(again.trace.steps.is_empty());
    assert_eq!(again.equilibrium, expected);

    let s = fixture("std1.ugt");
    let r = pipeline(&s, Policy::EfrUniform, &opts).unwrap();
    assert!(r.trace.steps.is_empty());
    let nash = pure_nash(&s);
    assert_eq!(r.equilibrium, ugt_core::profile::Profile::from_pure(&s, &nash[0]));
    assert_eq!(r.to_json().unwrap()["schema"], "ugt.pipeline/1");
}

#[test]
fn pipeline_requires_rationalizable_policy() {
    let g = fixture("ex1.ugt");
    let p = Policy::Table { entries: BTreeMap::new(), fallback: Box::new(Policy::EfrLexFirst) };
    assert!(matches!(pipeline(&g, p, &PipelineOptions::default()), Err(Error::Precondition(_))));
}

#[test]
fn rationalizable_search_on_ex1() {
    let g = fixture("ex1.ugt");
    let d = fixture("ex1_discovered.ugt");
    let w = rationalizable_search(&g, &PipelineOptions::default(), 16).unwrap().unwrap();
    assert_eq!(w.path.len(), 2);
    assert_eq!(w.path[0].0, g);
    assert_eq!(w.path[1].0, d);
    let expected = ugt_core::profile::parse_profile(&d, &fixture_text("ex1_discovered_rsce.json")).unwrap();
    assert_eq!(w.equilibrium, expected);
    let s = fixture("std1.ugt");
    let w = rationalizable_search(&s, &PipelineOptions::default(), 4).unwrap().unwrap();
    assert_eq!(w.path.len(), 1);
}
