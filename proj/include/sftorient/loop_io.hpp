#ifndef SFTORIENT_LOOP_IO_HPP
#define SFTORIENT_LOOP_IO_HPP

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sftorient/czindex.hpp"

namespace sftorient::cz {

inline Matrix matrix_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) {
        throw std::invalid_argument(where + ": matrix must be a non-empty array of rows");
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    Matrix m(rows, rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows) {
            throw std::invalid_argument(where + ": matrix must be square");
        }
        for (Eigen::Index c = 0; c < rows; ++c) {
            if (!row[static_cast<std::size_t>(c)].is_number()) {
                throw std::invalid_argument(where + ": matrix entries must be numbers");
            }
            m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
        }
    }
    return m;
}

/// {"dim": d, "fourier": [{"k": k, "matrix": [[...]]}]} where k >= 0 is the
/// cos(2 pi k t) coefficient and k < 0 the sin(2 pi |k| t) coefficient, or
/// {"samples": [matrix, ...]} uniformly spaced on [0, 1).
inline SymmetricLoop loop_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("loop: top level must be an object");
    }
    if (j.contains("samples")) {
        std::vector<Matrix> samples;
        const auto& list = j.at("samples");
        if (!list.is_array() || list.empty()) {
            throw std::invalid_argument("loop: samples must be a non-empty array");
        }
        for (std::size_t i = 0; i < list.size(); ++i) {
            samples.push_back(matrix_from_json(list[i], "loop sample " + std::to_string(i)));
        }
        if (j.contains("dim") && j.at("dim").get<int>() != samples.front().rows()) {
            throw std::invalid_argument("loop: dim does not match the sample size");
        }
        return SymmetricLoop::from_samples(samples);
    }
    if (!j.contains("fourier") || !j.contains("dim")) {
        throw std::invalid_argument("loop: need either samples or dim + fourier");
    }
    const int dim = j.at("dim").get<int>();
    standard_j(dim);
    std::vector<Matrix> cos_terms(1, Matrix::Zero(dim, dim));
    std::vector<Matrix> sin_terms(1, Matrix::Zero(dim, dim));
    const auto& terms = j.at("fourier");
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string where = "loop fourier term " + std::to_string(i);
        const int k = terms[i].at("k").get<int>();
        const Matrix m = matrix_from_json(terms[i].at("matrix"), where);
        if (m.rows() != dim) {
            throw std::invalid_argument(where + ": matrix size differs from dim");
        }
        auto& list = k >= 0 ? cos_terms : sin_terms;
        const auto idx = static_cast<std::size_t>(std::abs(k));
        if (list.size() <= idx) {
            list.resize(idx + 1, Matrix::Zero(dim, dim));
        }
        list[idx] += m;
    }
    return SymmetricLoop(dim, std::move(cos_terms), std::move(sin_terms));
}

inline SymmetricLoop load_loop(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument(path + ": cannot open loop file");
    }
    try {
        return loop_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

} // namespace sftorient::cz

#endif // SFTORIENT_LOOP_IO_HPP
