// Every example must keep running against the current API.

macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));
        }

        #[test]
        fn $name() {
            $name::run_example().unwrap();
        }
    };
}

example!(analytic_regions);
example!(crossover);
example!(simulate_point);
example!(dominance_coupling);
example!(compare_boundaries);
example!(reproduce_figures);
