pub mod abgroup;
pub mod cli;
pub mod genus;
pub mod intalg;
pub mod model;
pub mod oracle;
