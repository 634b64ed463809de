#![allow(dead_code)]

pub mod cube_oracle;
pub mod shape_oracle;
