#pragma once

#include <Eigen/Dense>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dagcheck {

// Observations: N samples (rows) by n variables (columns). Column order
// defines the node binding once a dataset has been bound to a graph.
struct Dataset {
    Eigen::MatrixXd values;
    std::vector<std::string> column_names;

    Dataset() = default;
    Dataset(Eigen::MatrixXd m, std::vector<std::string> names)
        : values(std::move(m)), column_names(std::move(names)) {
        if (static_cast<Eigen::Index>(column_names.size()) != values.cols()) {
            throw std::invalid_argument("Dataset: column name count must match matrix width");
        }
        std::set<std::string> distinct(column_names.begin(), column_names.end());
        if (distinct.size() != column_names.size()) {
            throw std::invalid_argument("Dataset: column names must be distinct");
        }
        if (!values.allFinite()) {
            throw std::invalid_argument("Dataset: values must be finite (no missing entries)");
        }
    }

    int sample_count() const { return static_cast<int>(values.rows()); }
    int column_count() const { return static_cast<int>(values.cols()); }

    int column_index(const std::string& name) const {
        for (std::size_t k = 0; k < column_names.size(); ++k) {
            if (column_names[k] == name) return static_cast<int>(k);
        }
        throw std::out_of_range("Dataset: no column named '" + name + "'");
    }
};

}  // namespace dagcheck
