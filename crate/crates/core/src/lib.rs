mod linalg;
pub mod poly;
pub mod theta;
pub mod oracle;
pub mod jets;
pub mod szego;
pub mod degenerations;
pub mod picard;
pub mod report;
pub mod verify;
