//! Prompt assets and message rendering shared by the agents and the mock
//! provider. The three instruction prompts ship as text files and are pinned
//! byte-for-byte by golden tests; render functions here only build the user
//! messages that accompany them.

/// System prompt for per-paragraph topic retrieval.
pub const TOPIC_RETRIEVAL: &str = include_str!("../prompts/topic_retrieval.txt");

/// System prompt for the semantic topic matcher (existence check).
pub const TOPIC_EXISTENCE: &str = include_str!("../prompts/topic_existence.txt");

/// System prompt for the ontologist parent-selection step.
pub const TOPIC_INSERTION: &str = include_str!("../prompts/topic_insertion.txt");

/// System prompt for the optional yes/no product classifier used when
/// filtering product topics out of trend reports.
pub const PRODUCT_CLASSIFIER: &str = "You are a financial topic curator. Decide whether the given topic name refers to a specific commercial product or product line (for example a vehicle model or a chip model) rather than a general business theme. Respond with exactly one word: yes or no.";

// Leading lines of the instruction prompts. The mock provider dispatches on
// these, so they must stay in sync with the shipped assets (the golden tests
// pin the assets themselves).
pub const RETRIEVAL_MARKER: &str = "You are a financial analyst at a buy-side investment firm";
pub const EXISTENCE_MARKER: &str = "You are a semantic topic matcher";
pub const INSERTION_MARKER: &str = "You are an expert ontologist agent";

/// User message for the existence check: the reference-topic list followed by
/// the query, mirroring the matcher prompt's own example input.
pub fn render_existence_user(query: &str, reference_labels: &[String]) -> String {
    let mut s = String::from("Reference topics:\n");
    for label in reference_labels {
        s.push_str("- ");
        s.push_str(label);
        s.push('\n');
    }
    s.push_str("\nQuery topic: ");
    s.push_str(query);
    s
}

/// User message for parent selection: the topic plus a one-level tree map,
/// mirroring the insertion prompt's own input format.
pub fn render_insertion_user(query: &str, tree: &serde_json::Value) -> String {
    format!("Input:\n- Given Topic: \"{query}\"\n- Topic Tree: {tree}")
}

pub fn render_product_user(topic_name: &str) -> String {
    format!("Topic: {topic_name}")
}

/// Inverse of [`render_existence_user`] for the query line only.
pub fn extract_query_topic(user_message: &str) -> Option<&str> {
    user_message
        .lines()
        .find_map(|l| l.strip_prefix("Query topic: "))
        .map(str::trim)
}

/// Inverse of [`render_insertion_user`] for the quoted topic only.
pub fn extract_given_topic(user_message: &str) -> Option<&str> {
    let rest = user_message.split("- Given Topic: \"").nth(1)?;
    rest.split('"').next()
}

/// Inverse of [`render_product_user`].
pub fn extract_product_topic(user_message: &str) -> Option<&str> {
    user_message
        .lines()
        .find_map(|l| l.strip_prefix("Topic: "))
        .map(str::trim)
}
