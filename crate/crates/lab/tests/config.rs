use proptest::prelude::*;
use rmt_lab::ExperimentConfig;
use serde_json::Value;

proptest! {
    #[test]
    fn configs_round_trip(seed in any::<u64>(), sizes in prop::collection::vec(1usize..5000, 0..5),
                          samples in prop::option::of(1usize..1000), threads in prop::option::of(1usize..64),
                          x in -1e6f64..1e6, name in "[a-z_]{1,8}") {
        let mut c = ExperimentConfig::new("lsc", seed);
        c.sizes = sizes;
        c.samples = samples;
        c.threads = threads;
        c.params.insert(name, Value::from(x));
        let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.hash(), c.hash());
    }
}
