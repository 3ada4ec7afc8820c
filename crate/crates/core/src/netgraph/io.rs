//! JSON network description files. Unknown fields are rejected.

use serde::{Deserialize, Serialize};

use super::{DelayNetwork, NetError};

/// On-disk schema:
/// `{ "nodes": [..], "edges": [{"id","tail","head","delay"}, ..],
///    "sources": [3 names], "destinations": [3 names] }`
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeEntry>,
    pub sources: Vec<String>,
    pub destinations: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub delay: u32,
}

impl NetworkFile {
    pub fn into_network(self) -> Result<DelayNetwork, NetError> {
        if self.sources.len() != 3 || self.destinations.len() != 3 {
            return Err(NetError::EndpointCount {
                sources: self.sources.len(),
                destinations: self.destinations.len(),
            });
        }
        let srcs: [String; 3] = self.sources.try_into().expect("length checked");
        let dsts: [String; 3] = self.destinations.try_into().expect("length checked");
        DelayNetwork::from_parts(
            self.nodes,
            self.edges.into_iter().map(|e| (e.id, e.tail, e.head, e.delay)).collect(),
            srcs,
            dsts,
        )
    }

    pub fn from_network(net: &DelayNetwork) -> Self {
        NetworkFile {
            nodes: (0..net.node_count()).map(|v| net.node_name(v).to_string()).collect(),
            edges: net
                .edges()
                .iter()
                .map(|e| EdgeEntry {
                    id: e.id.clone(),
                    tail: net.node_name(e.tail).to_string(),
                    head: net.node_name(e.head).to_string(),
                    delay: e.delay,
                })
                .collect(),
            sources: net.sources().iter().map(|&v| net.node_name(v).to_string()).collect(),
            destinations: net.destinations().iter().map(|&v| net.node_name(v).to_string()).collect(),
        }
    }
}

pub fn network_from_json(text: &str) -> Result<DelayNetwork, NetError> {
    let file: NetworkFile =
        serde_json::from_str(text).map_err(|e| NetError::Parse(e.to_string()))?;
    file.into_network()
}

pub fn network_to_json(net: &DelayNetwork) -> String {
    serde_json::to_string_pretty(&NetworkFile::from_network(net)).expect("schema serializes")
}
