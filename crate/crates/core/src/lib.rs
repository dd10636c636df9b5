pub mod cli;
pub mod corpus;
pub mod kinding;
pub mod normalize;
pub mod oracle;
pub mod program;
pub mod reduce;
pub mod surface;
pub mod syntax;
pub mod typing;
