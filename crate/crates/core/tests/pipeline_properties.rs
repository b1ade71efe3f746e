//! Cross-module properties of the full fit pipeline, checked on randomized
//! inputs. Each property re-derives the expected answer through a second,
//! simpler code path rather than trusting the implementation under test.

use occamlab::aggregate::sample_aggregated;
use occamlab::inference::{evidence_sandwich, profile_loglik, EvidenceTable};
use occamlab::learners::{
    map_score, mdl_score, orb_score, order_key, select, smap_score, Algorithm,
};
use occamlab::prior::{ClassifierPrior, ThetaPrior};
use occamlab::problem::ProblemSpec;
use proptest::prelude::*;

fn spec() -> ProblemSpec {
    ProblemSpec::new(0.2, 0.3, 0.5).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Posterior weights over the full aggregated table normalize.
    #[test]
    fn posterior_table_normalizes(m in 1u64..96, seed in 0u64..1_000_000) {
        let s = spec();
        let sample = sample_aggregated(&s, m, &ClassifierPrior::DyadicBlock, None, seed).unwrap();
        let table = EvidenceTable::build(m, &ThetaPrior::uniform(), &sample.table_entries());
        let total = table.posterior_total();
        prop_assert!((total - 1.0).abs() < 1e-9, "posterior total {total}");
    }

    /// The selector returns the row a direct scan of the score function
    /// would pick, with ties broken toward the smallest classifier index.
    #[test]
    fn selector_matches_direct_scan(
        m in 1u64..96,
        seed in 0u64..1_000_000,
        alg_idx in 0usize..4,
    ) {
        let s = spec();
        let theta = ThetaPrior::uniform();
        let sample = sample_aggregated(&s, m, &ClassifierPrior::DyadicBlock, None, seed).unwrap();
        let entries = sample.table_entries();
        let alg = [Algorithm::Map, Algorithm::Smap, Algorithm::Mdl, Algorithm::Orb][alg_idx];
        let selection = select(alg, &entries, m, &theta).unwrap();

        let mut best: Option<(f64, f64, u64)> = None;
        for e in &entries {
            if e.log2_unit_mass.is_infinite() {
                continue;
            }
            let score = match alg {
                Algorithm::Map => map_score(e.log2_unit_mass, e.errors, m, &theta),
                Algorithm::Smap => smap_score(e.log2_unit_mass, e.errors, m, &theta),
                Algorithm::Mdl => mdl_score(e.log2_unit_mass, e.errors, m),
                Algorithm::Orb => orb_score(e.log2_unit_mass, e.errors, m),
                Algorithm::Bayes => unreachable!(),
            };
            let key = (score, order_key(&e.id), e.errors);
            if best.is_none_or(|b| (key.0, key.1, key.2) < b) {
                best = Some(key);
            }
        }
        let (score, key, _) = best.unwrap();
        prop_assert!((selection.score - score).abs() < 1e-12);
        prop_assert!((order_key(&selection.id) - key).abs() < 1e-12);
    }

    /// Integrated evidence never beats the maximized likelihood, and the
    /// closed-form bracket contains it whenever its precondition holds.
    #[test]
    fn evidence_bracketing(m in 1u64..800, frac in 0.0f64..=1.0) {
        let a = ((m as f64) * frac).round() as u64;
        let theta = ThetaPrior::uniform();
        let neg_log_ev = -theta.log2_evidence(a, m);
        prop_assert!(neg_log_ev >= profile_loglik(a, m) - 1e-9);

        let alpha = 0.05;
        if let Ok((lo, hi)) = evidence_sandwich(a, m, 1.0, alpha) {
            prop_assert!(
                (lo - 1e-9..=hi + 1e-9).contains(&neg_log_ev),
                "evidence {neg_log_ev} outside [{lo}, {hi}] at a={a} m={m}"
            );
        }
    }

    /// Sequential prediction telescopes: per-step losses sum to the joint
    /// codelength, and each mistake costs at least one bit.
    #[test]
    fn sequential_chain_rule(m in 1u64..200, seed in 0u64..1_000_000) {
        let s = spec();
        let report = occamlab::bayes::sequential_bayes_aggregated(
            &s,
            m,
            &ThetaPrior::uniform(),
            None,
            seed,
        )
        .unwrap();
        prop_assert!(report.chain_rule_gap < 1e-6, "gap {}", report.chain_rule_gap);
        prop_assert!(report.mistakes as f64 <= report.log_loss_bits + 1e-9);
        let step_sum: f64 = report.per_step_log_loss.iter().sum();
        prop_assert!((step_sum - report.log_loss_bits).abs() < 1e-9);
    }
}
