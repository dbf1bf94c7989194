//! Network JSON interchange. Weights and biases travel as decimal strings
//! (shortest round-trip representation), so a load/save cycle is bit-exact.

use serde::{Deserialize, Serialize};

use super::{Activation, Edge, Network, NetworkError, Neuron, Role, UpdateMode};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Decimal {
    Text(String),
    Number(f64),
}

impl Decimal {
    fn parse<T: Scalar>(&self, what: &str) -> Result<T, NetworkError> {
        match self {
            Decimal::Text(s) => s
                .trim()
                .parse::<T>()
                .map_err(|_| NetworkError::Json(format!("{what}: `{s}` is not a decimal number"))),
            Decimal::Number(x) => Ok(T::lit(*x)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct NeuronJson {
    id: usize,
    bias: Decimal,
    activation: Activation,
    role: Role,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct EdgeJson {
    from: usize,
    to: usize,
    w: Decimal,
}

/// Serialized form of a [`Network`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkJson {
    update: UpdateMode,
    neurons: Vec<NeuronJson>,
    edges: Vec<EdgeJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    softmax_groups: Vec<Vec<usize>>,
}

impl<T: Scalar> Network<T> {
    pub fn to_json_value(&self) -> NetworkJson {
        NetworkJson {
            update: self.update,
            neurons: self
                .neurons
                .iter()
                .map(|n| NeuronJson {
                    id: n.id,
                    bias: Decimal::Text(n.bias.to_string()),
                    activation: n.activation,
                    role: n.role.clone(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    from: e.from,
                    to: e.to,
                    w: Decimal::Text(e.w.to_string()),
                })
                .collect(),
            softmax_groups: self.softmax_groups.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("network serializes")
    }

    pub fn from_json_value(doc: &NetworkJson) -> Result<Self, NetworkError> {
        let mut neurons: Vec<Neuron<T>> = doc
            .neurons
            .iter()
            .map(|n| {
                Ok(Neuron {
                    id: n.id,
                    bias: n.bias.parse(&format!("bias of neuron {}", n.id))?,
                    activation: n.activation,
                    role: n.role.clone(),
                })
            })
            .collect::<Result<_, NetworkError>>()?;
        neurons.sort_by_key(|n| n.id);
        let edges = doc
            .edges
            .iter()
            .map(|e| {
                Ok(Edge {
                    from: e.from,
                    to: e.to,
                    w: e.w.parse(&format!("weight {} -> {}", e.from, e.to))?,
                })
            })
            .collect::<Result<_, NetworkError>>()?;
        Network::new(neurons, edges, doc.update, doc.softmax_groups.clone())
    }

    pub fn from_json(text: &str) -> Result<Self, NetworkError> {
        let doc: NetworkJson = serde_json::from_str(text).map_err(|e| NetworkError::Json(e.to_string()))?;
        Network::from_json_value(&doc)
    }
}
