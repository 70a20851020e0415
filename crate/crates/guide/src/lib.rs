//! The mdbook guide under `book/`, compiled so its code blocks run as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/engine.md")]
pub mod engine {}

#[doc = include_str!("../../../book/src/radio.md")]
pub mod radio {}

#[doc = include_str!("../../../book/src/mobility.md")]
pub mod mobility {}

#[doc = include_str!("../../../book/src/aodv.md")]
pub mod aodv {}

#[doc = include_str!("../../../book/src/blackhole.md")]
pub mod blackhole {}

#[doc = include_str!("../../../book/src/metrics.md")]
pub mod metrics {}

#[doc = include_str!("../../../book/src/configuration.md")]
pub mod configuration {}
