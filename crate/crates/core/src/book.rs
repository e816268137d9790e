// The guide's code listings run as doctests through these empty modules.

#[doc = include_str!("../../../book/src/intro.md")]
mod intro {}
#[doc = include_str!("../../../book/src/gf2.md")]
mod gf2 {}
#[doc = include_str!("../../../book/src/field.md")]
mod field {}
#[doc = include_str!("../../../book/src/registers.md")]
mod registers {}
#[doc = include_str!("../../../book/src/generator.md")]
mod generator {}
#[doc = include_str!("../../../book/src/attack.md")]
mod attack {}
#[doc = include_str!("../../../book/src/complexity.md")]
mod complexity {}
#[doc = include_str!("../../../book/src/cli.md")]
mod cli {}
