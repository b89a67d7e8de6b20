#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dagcheck/dag.hpp"
#include "dagcheck/dataset.hpp"
#include "dagcheck/falsify.hpp"

namespace dagcheck {

// Parse or format errors carry the offending file and, when known, line.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Graph text format: one "src -> dst" edge per line, optional isolated-node
// declarations "node <name>", '#' comments. Node indices are assigned by
// sorted name, so write + read round-trips.
Dag read_graph(const std::filesystem::path& path);
Dag parse_graph(const std::string& text, const std::string& origin = "<string>");
std::string format_graph(const Dag& g);
void write_graph(const Dag& g, const std::filesystem::path& path,
                 const std::vector<std::string>& header_comments = {});

enum class MissingPolicy { reject, drop_rows };

std::string_view to_string(MissingPolicy policy);
MissingPolicy missing_policy_from_string(std::string_view name);

struct CsvReadResult {
    Dataset data;
    int dropped_rows = 0;
};

// CSV with a header row; cells must be numeric. Empty cells and NA/NaN/null
// tokens are missing values, handled per policy.
CsvReadResult read_dataset(const std::filesystem::path& path, MissingPolicy policy);
CsvReadResult parse_dataset(const std::string& text, MissingPolicy policy,
                            const std::string& origin = "<string>");
void write_dataset(const Dataset& data, const std::filesystem::path& path,
                   const std::vector<std::string>& header_comments = {});

struct BindResult {
    Dag graph;     // possibly an induced subgraph when nodes were excluded
    Dataset data;  // columns reordered to node-index order
    std::vector<std::string> excluded_nodes;
};

// Matches dataset columns to graph nodes by name (by position for unnamed
// graphs). Graph nodes without a data column are an error unless
// allow_node_exclusion, in which case the graph is restricted to the
// observed nodes. Dataset columns that match no node are always an error.
BindResult bind_dataset(const Dag& g, const Dataset& data, bool allow_node_exclusion);

// Report JSON. Strict parsing rejects unknown fields.
nlohmann::json report_to_json(const FalsificationReport& report);
FalsificationReport report_from_json(const nlohmann::json& j, bool strict = true);
void write_report(const FalsificationReport& report, const std::filesystem::path& path,
                  const nlohmann::json& config_echo, const std::vector<std::string>& node_names);

}  // namespace dagcheck
