//! Executable semantic encodings between logic and neural networks.
//!
//! Knowledge bases are parsed and enumerated in [`logic`], logic programs are
//! compiled to threshold networks in [`programs`], network dynamics and limit
//! sets live in [`network`], and [`encoding`] decides whether a network
//! represents a knowledge base. [`fidelity`] grades partial success,
//! [`soft`] turns sentences into differentiable losses, and [`theory`]
//! runs the learning-theory experiments on finite classification tasks.

pub mod encoding;
pub mod fidelity;
pub mod logic;
pub mod network;
pub mod programs;
pub mod scalar;
pub mod soft;
pub mod theory;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Logic(#[from] logic::LogicError),
    #[error(transparent)]
    Network(#[from] network::NetworkError),
    #[error(transparent)]
    Encoding(#[from] encoding::EncodingError),
    #[error(transparent)]
    Fidelity(#[from] fidelity::FidelityError),
    #[error(transparent)]
    Soft(#[from] soft::SoftError),
    #[error(transparent)]
    Theory(#[from] theory::TheoryError),
}

pub type Network64 = network::Network<f64>;
pub type Network32 = network::Network<f32>;
pub type Interpretation64 = logic::Interpretation<f64>;
