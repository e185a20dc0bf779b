pub mod channels;
pub mod protocol;
pub mod scenarios;
pub mod statevec;
pub mod tol;
pub mod verify;
