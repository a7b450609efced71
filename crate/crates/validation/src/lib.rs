//! Holds the `acceptance` test target; run it with
//! `cargo test -p spa-outage-validation --test acceptance`.
