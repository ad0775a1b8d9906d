macro_rules! example_test {
    ($module:ident, $test:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example_test!(entropy_metrics, entropy_metrics_runs, "entropy_metrics.rs");
example_test!(
    fourier_spectrum,
    fourier_spectrum_runs,
    "fourier_spectrum.rs"
);
example_test!(
    approximate_degree,
    approximate_degree_runs,
    "approximate_degree.rs"
);
example_test!(main_chain, main_chain_runs, "main_chain.rs");
example_test!(
    one_query_decoder,
    one_query_decoder_runs,
    "one_query_decoder.rs"
);
example_test!(grover_fact1, grover_fact1_runs, "grover_fact1.rs");
example_test!(lemma_checks, lemma_checks_runs, "lemma_checks.rs");
