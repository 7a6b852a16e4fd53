#pragma once

// Internal JSON helpers shared by the core serialization code.

#include "fdmec/matrix.hpp"

#include "json.hpp"

namespace fdmec {

template <typename T>
void to_json(nlohmann::json& j, const Matrix<T>& m) {
    j = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        j.push_back(std::move(row));
    }
}

template <typename T>
void from_json(const nlohmann::json& j, Matrix<T>& m) {
    const std::size_t rows = j.size();
    const std::size_t cols = rows ? j.at(0).size() : 0;
    m = Matrix<T>(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& row = j.at(i);
        if (row.size() != cols) throw nlohmann::json::other_error::create(501, "ragged matrix", &j);
        for (std::size_t k = 0; k < cols; ++k) row.at(k).get_to(m(i, k));
    }
}

} // namespace fdmec
