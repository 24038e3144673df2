pub mod radial;
pub mod spectrum;
pub mod trajectory;
pub mod verify;
