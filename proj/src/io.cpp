#include "dagcheck/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dagcheck/version.hpp"

namespace dagcheck {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string_view strip_comment(std::string_view line) {
    const auto pos = line.find('#');
    return pos == std::string_view::npos ? line : line.substr(0, pos);
}

bool is_single_token(std::string_view s) {
    return !s.empty() && std::none_of(s.begin(), s.end(), [](char c) {
        return std::isspace(static_cast<unsigned char>(c));
    });
}

[[noreturn]] void parse_fail(const std::string& origin, int line, const std::string& message) {
    throw ParseError(origin + ":" + std::to_string(line) + ": " + message);
}

}  // namespace

Dag parse_graph(const std::string& text, const std::string& origin) {
    std::set<std::string> names;
    std::vector<std::pair<std::string, std::string>> named_edges;

    std::istringstream stream(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        const std::string_view line = trim(strip_comment(raw));
        if (line.empty()) continue;

        const auto arrow = line.find("->");
        if (arrow != std::string_view::npos) {
            if (line.find("->", arrow + 2) != std::string_view::npos) {
                parse_fail(origin, line_no, "expected a single 'src -> dst' edge per line");
            }
            const std::string src(trim(line.substr(0, arrow)));
            const std::string dst(trim(line.substr(arrow + 2)));
            if (!is_single_token(src) || !is_single_token(dst)) {
                parse_fail(origin, line_no, "edge endpoints must be non-empty single tokens");
            }
            if (src == dst) parse_fail(origin, line_no, "self-loop on node '" + src + "'");
            for (const auto& e : named_edges) {
                if (e.first == src && e.second == dst) {
                    parse_fail(origin, line_no, "duplicate edge '" + src + " -> " + dst + "'");
                }
            }
            names.insert(src);
            names.insert(dst);
            named_edges.emplace_back(src, dst);
            continue;
        }

        if (line.substr(0, 5) == "node " || line == "node") {
            const std::string name(trim(line.substr(std::min<std::size_t>(line.size(), 5))));
            if (!is_single_token(name)) {
                parse_fail(origin, line_no, "expected 'node <name>'");
            }
            names.insert(name);
            continue;
        }
        parse_fail(origin, line_no, "unrecognized line: '" + std::string(line) + "'");
    }

    if (names.empty()) throw ParseError(origin + ": graph file declares no nodes");

    // Deterministic index assignment: sorted names.
    std::vector<std::string> name_list(names.begin(), names.end());
    std::map<std::string, int> index;
    for (std::size_t k = 0; k < name_list.size(); ++k) index[name_list[k]] = static_cast<int>(k);

    std::vector<Edge> edges;
    edges.reserve(named_edges.size());
    for (const auto& [src, dst] : named_edges) edges.emplace_back(index[src], index[dst]);

    try {
        return Dag(static_cast<int>(name_list.size()), std::move(edges), std::move(name_list));
    } catch (const CycleError& e) {
        std::ostringstream message;
        message << origin << ": graph contains a cycle: ";
        for (std::size_t k = 0; k < e.cycle.size(); ++k) {
            if (k > 0) message << " -> ";
            auto it = names.begin();
            std::advance(it, e.cycle[k]);
            message << *it;
        }
        throw ParseError(message.str());
    }
}

Dag read_graph(const std::filesystem::path& path) {
    return parse_graph(read_file(path), path.string());
}

std::string format_graph(const Dag& g) {
    const auto names = g.has_node_names() ? g.node_names() : default_node_names(g.node_count());
    std::vector<std::pair<std::string, std::string>> lines;
    lines.reserve(g.edges().size());
    for (const auto& [from, to] : g.edges()) {
        lines.emplace_back(names[static_cast<std::size_t>(from)], names[static_cast<std::size_t>(to)]);
    }
    std::sort(lines.begin(), lines.end());

    std::vector<std::string> isolated;
    for (int v = 0; v < g.node_count(); ++v) {
        if (g.parents(v).empty() && g.children(v).empty()) {
            isolated.push_back(names[static_cast<std::size_t>(v)]);
        }
    }
    std::sort(isolated.begin(), isolated.end());

    std::ostringstream out;
    for (const auto& name : isolated) out << "node " << name << "\n";
    for (const auto& [src, dst] : lines) out << src << " -> " << dst << "\n";
    return out.str();
}

void write_graph(const Dag& g, const std::filesystem::path& path,
                 const std::vector<std::string>& header_comments) {
    std::ostringstream out;
    for (const auto& comment : header_comments) out << "# " << comment << "\n";
    out << format_graph(g);
    write_file(path, out.str());
}

std::string_view to_string(MissingPolicy policy) {
    return policy == MissingPolicy::reject ? "reject" : "drop-rows";
}

MissingPolicy missing_policy_from_string(std::string_view name) {
    if (name == "reject") return MissingPolicy::reject;
    if (name == "drop-rows" || name == "drop_rows") return MissingPolicy::drop_rows;
    throw std::invalid_argument("unknown missing policy: " + std::string(name));
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.emplace_back(trim(line.substr(start)));
            break;
        }
        cells.emplace_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

bool is_missing_token(std::string_view cell) {
    if (cell.empty()) return true;
    std::string lower(cell);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return lower == "na" || lower == "nan" || lower == "null";
}

bool parse_number(std::string_view cell, double& value) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    return ec == std::errc() && ptr == end && std::isfinite(value);
}

}  // namespace

CsvReadResult parse_dataset(const std::string& text, MissingPolicy policy,
                            const std::string& origin) {
    std::istringstream stream(text);
    std::string raw;
    int line_no = 0;

    std::vector<std::string> header;
    while (std::getline(stream, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (trim(raw).empty() || raw[0] == '#') continue;
        header = split_csv_line(raw);
        break;
    }
    if (header.empty()) throw ParseError(origin + ": missing CSV header row");
    for (const auto& name : header) {
        if (name.empty()) throw ParseError(origin + ": empty column name in header");
    }

    const std::size_t width = header.size();
    std::vector<std::vector<double>> rows;
    int dropped = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (trim(raw).empty() || raw[0] == '#') continue;
        const auto cells = split_csv_line(raw);
        if (cells.size() != width) {
            parse_fail(origin, line_no, "expected " + std::to_string(width) + " cells, got " +
                                            std::to_string(cells.size()));
        }
        std::vector<double> row(width);
        bool gap = false;
        for (std::size_t c = 0; c < width; ++c) {
            if (is_missing_token(cells[c])) {
                gap = true;
                if (policy == MissingPolicy::reject) {
                    parse_fail(origin, line_no, "missing value in column '" + header[c] + "'");
                }
                break;
            }
            if (!parse_number(cells[c], row[c])) {
                if (policy == MissingPolicy::reject) {
                    parse_fail(origin, line_no,
                               "non-numeric cell '" + cells[c] + "' in column '" + header[c] + "'");
                }
                gap = true;
                break;
            }
        }
        if (gap) {
            ++dropped;
            continue;
        }
        rows.push_back(std::move(row));
    }

    if (rows.size() < 4) {
        throw ParseError(origin + ": need at least 4 complete rows, got " +
                         std::to_string(rows.size()));
    }
    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    CsvReadResult result{Dataset(std::move(values), header), dropped};
    if (dropped > 0) {
        std::fprintf(stderr, "[dagcheck] %s: dropped %d row(s) with missing values\n",
                     origin.c_str(), dropped);
    }
    return result;
}

CsvReadResult read_dataset(const std::filesystem::path& path, MissingPolicy policy) {
    return parse_dataset(read_file(path), policy, path.string());
}

void write_dataset(const Dataset& data, const std::filesystem::path& path,
                   const std::vector<std::string>& header_comments) {
    std::ostringstream out;
    for (const auto& comment : header_comments) out << "# " << comment << "\n";
    for (std::size_t c = 0; c < data.column_names.size(); ++c) {
        if (c > 0) out << ",";
        out << data.column_names[c];
    }
    out << "\n";
    char buffer[64];
    for (int r = 0; r < data.sample_count(); ++r) {
        for (int c = 0; c < data.column_count(); ++c) {
            std::snprintf(buffer, sizeof(buffer), "%.17g", data.values(r, c));
            if (c > 0) out << ",";
            out << buffer;
        }
        out << "\n";
    }
    write_file(path, out.str());
}

BindResult bind_dataset(const Dag& g, const Dataset& data, bool allow_node_exclusion) {
    if (!g.has_node_names()) {
        if (data.column_count() != g.node_count()) {
            throw std::invalid_argument(
                "bind_dataset: unnamed graph requires positional binding, but dataset has " +
                std::to_string(data.column_count()) + " columns for " +
                std::to_string(g.node_count()) + " nodes");
        }
        return BindResult{g, data, {}};
    }

    std::map<std::string, int> column_of;
    for (std::size_t c = 0; c < data.column_names.size(); ++c) {
        column_of[data.column_names[c]] = static_cast<int>(c);
    }

    std::vector<int> keep_nodes;
    std::vector<std::string> excluded;
    std::set<std::string> used_columns;
    for (int v = 0; v < g.node_count(); ++v) {
        const auto& name = g.node_names()[static_cast<std::size_t>(v)];
        if (auto it = column_of.find(name); it != column_of.end()) {
            keep_nodes.push_back(v);
            used_columns.insert(name);
        } else {
            excluded.push_back(name);
        }
    }

    std::vector<std::string> unmatched;
    for (const auto& name : data.column_names) {
        if (!used_columns.count(name)) unmatched.push_back(name);
    }
    if (!unmatched.empty()) {
        std::string message = "bind_dataset: dataset columns not present in the graph:";
        for (const auto& name : unmatched) message += " " + name;
        throw std::invalid_argument(message);
    }
    if (!excluded.empty() && !allow_node_exclusion) {
        std::string message = "bind_dataset: graph nodes without data columns:";
        for (const auto& name : excluded) message += " " + name;
        message += " (enable node exclusion to evaluate the observed subgraph)";
        throw std::invalid_argument(message);
    }

    const Dag bound_graph = excluded.empty() ? g : induced_subgraph(g, keep_nodes);
    Eigen::MatrixXd values(data.values.rows(), static_cast<Eigen::Index>(keep_nodes.size()));
    std::vector<std::string> names;
    names.reserve(keep_nodes.size());
    for (std::size_t k = 0; k < keep_nodes.size(); ++k) {
        const auto& name = g.node_names()[static_cast<std::size_t>(keep_nodes[k])];
        values.col(static_cast<Eigen::Index>(k)) = data.values.col(column_of.at(name));
        names.push_back(name);
    }
    if (!excluded.empty()) {
        std::string message = "[dagcheck] excluded graph nodes without data:";
        for (const auto& name : excluded) message += " " + name;
        std::fprintf(stderr, "%s\n", message.c_str());
    }
    return BindResult{bound_graph, Dataset(std::move(values), std::move(names)), excluded};
}

namespace {

using nlohmann::json;

void check_keys(const json& object, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = object.begin(); it != object.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ParseError("report: unknown field '" + it.key() + "' in " + where);
        }
    }
}

}  // namespace

json report_to_json(const FalsificationReport& report) {
    json j;
    j["schema_version"] = 1;
    j["p_lmc"] = report.p_lmc;
    j["p_lmc_ci"] = {report.p_lmc_ci.first, report.p_lmc_ci.second};
    j["p_tpa"] = report.p_tpa;
    j["f_lmc"] = report.f_lmc;
    j["given_violation_count"] = report.given_violation_count;
    j["parental_triple_count"] = report.parental_triple_count;
    j["n_permutations"] = report.n_permutations;
    j["alpha"] = report.alpha;
    j["seed"] = report.seed;
    j["ci_confidence"] = report.ci_confidence;
    j["conservative_pvalue"] = report.conservative_pvalue;
    j["exhaustive"] = report.exhaustive;
    j["test"] = std::string(report.test_name);
    if (std::isinf(report.shannon_info_bits)) {
        j["shannon_info_bits"] = nullptr;
        j["shannon_info_lower_bound_bits"] = std::log2(static_cast<double>(report.n_permutations));
    } else {
        j["shannon_info_bits"] = report.shannon_info_bits;
    }
    j["permutation_violation_counts"] = report.permutation_violation_counts;
    j["ci_failures"] = {{"given_graph", report.ci_failures.given_graph},
                        {"permuted_graphs", report.ci_failures.permuted_graphs},
                        {"marginal", report.ci_failures.marginal}};
    j["verdict"] = std::string(to_string(report.verdict));

    json violations = json::array();
    for (const auto& v : report.v_lmc) {
        violations.push_back({{"i", v.triple.i}, {"j", v.triple.j}, {"z", v.triple.z},
                              {"p_value", v.p_value}});
    }
    j["v_lmc"] = std::move(violations);

    json md = json::array();
    for (const auto& v : report.v_md) {
        md.push_back({{"node", v.node}, {"ancestor", v.ancestor}, {"p_value", v.p_value}});
    }
    j["v_md"] = std::move(md);

    j["timing"] = {{"wall_seconds", report.wall_seconds}};
    return j;
}

FalsificationReport report_from_json(const json& j, bool strict) {
    static const std::set<std::string> kTopLevel = {
        "schema_version", "p_lmc", "p_lmc_ci", "p_tpa", "f_lmc", "given_violation_count",
        "parental_triple_count", "n_permutations", "alpha", "seed", "ci_confidence",
        "conservative_pvalue", "exhaustive", "test", "shannon_info_bits",
        "shannon_info_lower_bound_bits", "permutation_violation_counts", "ci_failures",
        "verdict", "v_lmc", "v_md", "timing", "config", "node_names", "tool_version"};
    if (strict) {
        check_keys(j, kTopLevel, "report");
        check_keys(j.at("ci_failures"), {"given_graph", "permuted_graphs", "marginal"}, "ci_failures");
        check_keys(j.at("timing"), {"wall_seconds"}, "timing");
        for (const auto& v : j.at("v_lmc")) check_keys(v, {"i", "j", "z", "p_value"}, "v_lmc entry");
        for (const auto& v : j.at("v_md")) check_keys(v, {"node", "ancestor", "p_value"}, "v_md entry");
    }
    if (j.at("schema_version").get<int>() != 1) {
        throw ParseError("report: unsupported schema_version");
    }

    FalsificationReport report;
    report.p_lmc = j.at("p_lmc").get<double>();
    report.p_lmc_ci = {j.at("p_lmc_ci").at(0).get<double>(), j.at("p_lmc_ci").at(1).get<double>()};
    report.p_tpa = j.at("p_tpa").get<double>();
    report.f_lmc = j.at("f_lmc").get<double>();
    report.given_violation_count = j.at("given_violation_count").get<int>();
    report.parental_triple_count = j.at("parental_triple_count").get<std::int64_t>();
    report.n_permutations = j.at("n_permutations").get<int>();
    report.alpha = j.at("alpha").get<double>();
    report.seed = j.at("seed").get<std::uint64_t>();
    report.ci_confidence = j.at("ci_confidence").get<double>();
    report.conservative_pvalue = j.at("conservative_pvalue").get<bool>();
    report.exhaustive = j.at("exhaustive").get<bool>();
    report.test_name = j.at("test").get<std::string>();
    report.shannon_info_bits = j.at("shannon_info_bits").is_null()
                                   ? std::numeric_limits<double>::infinity()
                                   : j.at("shannon_info_bits").get<double>();
    report.permutation_violation_counts =
        j.at("permutation_violation_counts").get<std::vector<int>>();
    report.ci_failures.given_graph = j.at("ci_failures").at("given_graph").get<std::int64_t>();
    report.ci_failures.permuted_graphs =
        j.at("ci_failures").at("permuted_graphs").get<std::int64_t>();
    report.ci_failures.marginal = j.at("ci_failures").at("marginal").get<std::int64_t>();
    report.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    for (const auto& v : j.at("v_lmc")) {
        LmcViolation violation;
        violation.triple.i = v.at("i").get<int>();
        violation.triple.j = v.at("j").get<int>();
        violation.triple.z = v.at("z").get<std::vector<int>>();
        violation.p_value = v.at("p_value").get<double>();
        report.v_lmc.push_back(std::move(violation));
    }
    for (const auto& v : j.at("v_md")) {
        report.v_md.push_back(MdViolation{v.at("node").get<int>(), v.at("ancestor").get<int>(),
                                          v.at("p_value").get<double>()});
    }
    report.wall_seconds = j.at("timing").at("wall_seconds").get<double>();
    return report;
}

void write_report(const FalsificationReport& report, const std::filesystem::path& path,
                  const json& config_echo, const std::vector<std::string>& node_names) {
    json j = report_to_json(report);
    j["config"] = config_echo;
    j["node_names"] = node_names;
    j["tool_version"] = kVersion;
    write_file(path, j.dump(2) + "\n");
}

}  // namespace dagcheck
