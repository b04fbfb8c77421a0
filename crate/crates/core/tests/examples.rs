//! Every example program must run to completion.

macro_rules! example {
    ($module:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $module() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(mls_codes, "mls_codes.rs");
example!(encode_decode, "encode_decode.rs");
example!(transaction_energy, "transaction_energy.rs");
example!(link_budget, "link_budget.rs");
example!(pdr_sweep, "pdr_sweep.rs");
example!(wake_up_simulation, "wake_up_simulation.rs");
example!(battery_lifetime, "battery_lifetime.rs");
example!(scenario_file, "scenario_file.rs");
