//! The swanforge guide as doctests. Each chapter of `book/src` is a module,
//! so a failing snippet names its chapter.

#[doc = include_str!("../../../book/src/index.md")]
pub mod index {}
#[doc = include_str!("../../../book/src/groups.md")]
pub mod groups {}
#[doc = include_str!("../../../book/src/conductors.md")]
pub mod conductors {}
#[doc = include_str!("../../../book/src/delta.md")]
pub mod delta {}
#[doc = include_str!("../../../book/src/suites.md")]
pub mod suites {}
#[doc = include_str!("../../../book/src/dyadic.md")]
pub mod dyadic {}
#[doc = include_str!("../../../book/src/g2.md")]
pub mod g2 {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
