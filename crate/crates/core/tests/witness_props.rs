use lumpex_core::census::enumerate_families;
use lumpex_core::witness::{constructive_witness, search_witness, verify_witness, WitnessConfig, DEFAULT_WITNESS_TOL};
use lumpex_core::{Certificate, DecideConfig, Execution};

#[test]
fn constructive_seed_breaks_redundant_blocks() {
    let config = DecideConfig::default();
    let mut checked = 0;
    for sizes in [[1, 2].as_slice(), &[2, 2], &[1, 3], &[1, 1, 2]] {
        let n: usize = sizes.iter().sum();
        for c in enumerate_families(n, sizes, &config, Execution::default()).unwrap() {
            if let Certificate::RedundantMergingBlock { block, .. } = c.verdict.certificate {
                let w = constructive_witness(&c.representative, &c.lumping, block).unwrap();
                assert!(w.violation > DEFAULT_WITNESS_TOL, "{:?}", c.canonical_key);
                assert!(verify_witness(&c.representative, &c.lumping, &w, DEFAULT_WITNESS_TOL));
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn search_round_trips_and_spares_e_families() {
    let config = DecideConfig::default();
    let wc = WitnessConfig { attempts: 500, ..WitnessConfig::default() };
    for sizes in [[1, 2].as_slice(), &[2, 2], &[1, 3], &[1, 1, 2]] {
        let n: usize = sizes.iter().sum();
        for c in enumerate_families(n, sizes, &config, Execution::default()).unwrap() {
            let found = search_witness(&c.representative, &c.lumping, &wc).unwrap();
            if c.verdict.is_e_family() {
                assert!(found.is_none(), "{:?}", c.canonical_key);
            } else if let Some(w) = found {
                assert!(verify_witness(&c.representative, &c.lumping, &w, wc.tol));
                let again = search_witness(&c.representative, &c.lumping, &wc).unwrap().unwrap();
                assert_eq!(again, w);
            }
        }
    }
}
