#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace thd {

// Data, configuration, or precondition failures. The CLI maps this to exit 1.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A user-supplied argument (row id, node id, format name) that refers to
// nothing. The CLI maps this to exit 2.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

using RowId = std::int32_t;

// Sorted, duplicate-free set of row ids into one Dataset.
struct Group {
    std::vector<RowId> rows;

    bool empty() const { return rows.empty(); }
    std::size_t size() const { return rows.size(); }

    bool contains(RowId r) const {
        return std::binary_search(rows.begin(), rows.end(), r);
    }

    // Sorts and deduplicates.
    static Group of(std::vector<RowId> ids) {
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        return Group{std::move(ids)};
    }

    static Group range(RowId begin, RowId end) {
        Group g;
        if (end <= begin) return g;
        g.rows.reserve(static_cast<std::size_t>(end - begin));
        for (RowId r = begin; r < end; ++r) g.rows.push_back(r);
        return g;
    }

    bool operator==(const Group&) const = default;
};

inline bool groups_disjoint(const Group& a, const Group& b) {
    auto ia = a.rows.begin();
    auto ib = b.rows.begin();
    while (ia != a.rows.end() && ib != b.rows.end()) {
        if (*ia < *ib) ++ia;
        else if (*ib < *ia) ++ib;
        else return false;
    }
    return true;
}

// Dense row-major matrix of doubles. The numeric workhorse handed from the
// data model to geometry.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const double* row(std::size_t r) const { return data_.data() + r * cols_; }
    double* row(std::size_t r) { return data_.data() + r * cols_; }

    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace thd
