#pragma once

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "thd/csv.hpp"
#include "thd/sha256.hpp"
#include "thd/types.hpp"

namespace thd {

enum class FeatureKind { Continuous, Categorical };

struct FeatureMeta {
    std::string name;
    FeatureKind kind = FeatureKind::Continuous;
    bool excluded = false;  // held out of the analysis matrix, still reportable
    bool is_label = false;  // implies excluded
};

// Typing directives for ingestion. Cells equal to a sentinel value are
// flagged missing instead of being parsed as magnitudes.
struct CsvSchema {
    std::optional<std::string> label;
    std::vector<std::string> excluded;
    std::vector<double> sentinels;
    std::map<std::string, FeatureKind> kinds;  // per-column overrides
};

namespace detail {

inline bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (end != begin + s.size() || errno == ERANGE) return false;
    out = v;
    return true;
}

inline std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

}  // namespace detail

// Immutable column-major table: continuous columns hold reals, categorical
// columns hold dense level codes with a code -> string dictionary. Row ids
// are 0..rows-1 and stay stable through every downstream operation.
class Dataset {
public:
    Dataset() = default;

    std::size_t row_count() const { return rows_; }
    const std::vector<FeatureMeta>& features() const { return features_; }
    const FeatureMeta& feature(std::size_t i) const { return features_[i]; }

    int feature_index(std::string_view name) const {
        for (std::size_t i = 0; i < features_.size(); ++i)
            if (features_[i].name == name) return static_cast<int>(i);
        return -1;
    }

    int label_index() const { return label_index_; }

    double value(RowId row, std::size_t col) const {
        return columns_[col][static_cast<std::size_t>(row)];
    }
    bool is_missing(RowId row, std::size_t col) const {
        return missing_[col][static_cast<std::size_t>(row)] != 0;
    }

    // Level strings for a categorical column, indexed by code.
    const std::vector<std::string>& levels(std::size_t col) const { return levels_[col]; }

    Group all_rows() const { return Group::range(0, static_cast<RowId>(rows_)); }

    std::string content_sha256() const {
        Sha256 h;
        h.update_pod(rows_);
        for (std::size_t c = 0; c < features_.size(); ++c) {
            const auto& f = features_[c];
            h.update(f.name);
            h.update_pod(static_cast<int>(f.kind));
            h.update_pod(f.excluded);
            h.update_pod(f.is_label);
            for (const auto& lv : levels_[c]) {
                h.update(lv);
                h.update("\x1f");
            }
            for (double v : columns_[c]) h.update_pod(v);
            h.update(std::string_view(reinterpret_cast<const char*>(missing_[c].data()),
                                      missing_[c].size()));
        }
        return h.hex_digest();
    }

    bool operator==(const Dataset& other) const {
        if (rows_ != other.rows_) return false;
        if (features_.size() != other.features_.size()) return false;
        for (std::size_t c = 0; c < features_.size(); ++c) {
            const auto& a = features_[c];
            const auto& b = other.features_[c];
            if (a.name != b.name || a.kind != b.kind || a.excluded != b.excluded ||
                a.is_label != b.is_label)
                return false;
            if (levels_[c] != other.levels_[c]) return false;
            if (missing_[c] != other.missing_[c]) return false;
            for (std::size_t r = 0; r < rows_; ++r) {
                if (missing_[c][r]) continue;  // payload under a missing cell is irrelevant
                if (columns_[c][r] != other.columns_[c][r]) return false;
            }
        }
        return true;
    }

    // Appends the rows of `other`; feature names and kinds must match.
    // Categorical dictionaries are merged with codes remapped.
    static Dataset concat(const Dataset& a, const Dataset& b) {
        if (a.features_.size() != b.features_.size())
            throw Error("concat: datasets have different column counts");
        Dataset out = a;
        out.rows_ = a.rows_ + b.rows_;
        for (std::size_t c = 0; c < a.features_.size(); ++c) {
            const auto& fa = a.features_[c];
            const auto& fb = b.features_[c];
            if (fa.name != fb.name || fa.kind != fb.kind)
                throw Error("concat: column mismatch at '" + fa.name + "'");
            std::vector<int> remap(b.levels_[c].size(), -1);
            for (std::size_t lv = 0; lv < b.levels_[c].size(); ++lv) {
                const auto& s = b.levels_[c][lv];
                auto it = std::find(out.levels_[c].begin(), out.levels_[c].end(), s);
                if (it == out.levels_[c].end()) {
                    out.levels_[c].push_back(s);
                    remap[lv] = static_cast<int>(out.levels_[c].size() - 1);
                } else {
                    remap[lv] = static_cast<int>(it - out.levels_[c].begin());
                }
            }
            for (std::size_t r = 0; r < b.rows_; ++r) {
                double v = b.columns_[c][r];
                if (fa.kind == FeatureKind::Categorical && !b.missing_[c][r])
                    v = remap[static_cast<std::size_t>(v)];
                out.columns_[c].push_back(v);
                out.missing_[c].push_back(b.missing_[c][r]);
            }
        }
        return out;
    }

private:
    std::size_t rows_ = 0;
    std::vector<FeatureMeta> features_;
    std::vector<std::vector<double>> columns_;        // value or level code
    std::vector<std::vector<std::uint8_t>> missing_;  // per-cell flag
    std::vector<std::vector<std::string>> levels_;    // categorical dictionaries
    int label_index_ = -1;

    friend Dataset ingest_csv(std::istream&, const CsvSchema&);
};

// Parses delimited text with a header row into a typed Dataset. Columns
// where every non-missing cell parses as a number default to Continuous,
// everything else to Categorical; schema.kinds overrides, except that a
// label column is always treated as Categorical. Empty cells and cells
// matching a sentinel value are flagged missing.
inline Dataset ingest_csv(std::istream& in, const CsvSchema& schema) {
    auto records = csv::read(in);
    if (records.empty()) throw Error("csv: no header row");
    const std::size_t ncols = records.front().size();
    if (ncols > 1) {
        // blank lines cannot be records of a multi-column file; drop them
        std::erase_if(records, [](const std::vector<std::string>& r) {
            return r.size() == 1 && r[0].empty();
        });
    }

    const auto& header = records.front();
    for (std::size_t i = 0; i < ncols; ++i)
        for (std::size_t j = i + 1; j < ncols; ++j)
            if (header[i] == header[j])
                throw Error("csv: duplicate column name '" + header[i] + "'");

    auto column_of = [&](const std::string& name) -> int {
        for (std::size_t i = 0; i < ncols; ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    };
    if (schema.label && column_of(*schema.label) < 0)
        throw Error("schema: unknown label column '" + *schema.label + "'");
    for (const auto& name : schema.excluded)
        if (column_of(name) < 0) throw Error("schema: unknown excluded column '" + name + "'");
    for (const auto& [name, kind] : schema.kinds) {
        (void)kind;
        if (column_of(name) < 0) throw Error("schema: unknown column '" + name + "' in kinds");
    }

    const std::size_t nrows = records.size() - 1;
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != ncols) {
            throw Error("csv: row " + std::to_string(r) + " has " +
                        std::to_string(records[r].size()) + " fields, expected " +
                        std::to_string(ncols));
        }
    }

    auto is_sentinel = [&](const std::string& cell) {
        if (schema.sentinels.empty()) return false;
        double v;
        if (!detail::parse_double(cell, v)) return false;
        for (double s : schema.sentinels)
            if (v == s) return true;
        return false;
    };

    Dataset ds;
    ds.rows_ = nrows;
    ds.features_.resize(ncols);
    ds.columns_.assign(ncols, {});
    ds.missing_.assign(ncols, {});
    ds.levels_.assign(ncols, {});

    for (std::size_t c = 0; c < ncols; ++c) {
        FeatureMeta meta;
        meta.name = header[c];
        meta.is_label = schema.label && *schema.label == meta.name;

        // infer kind
        bool all_numeric = true;
        for (std::size_t r = 1; r <= nrows && all_numeric; ++r) {
            const auto& cell = records[r][c];
            if (cell.empty() || is_sentinel(cell)) continue;
            double v;
            if (!detail::parse_double(cell, v)) all_numeric = false;
        }
        meta.kind = all_numeric ? FeatureKind::Continuous : FeatureKind::Categorical;
        if (auto it = schema.kinds.find(meta.name); it != schema.kinds.end()) meta.kind = it->second;
        if (meta.is_label) meta.kind = FeatureKind::Categorical;
        for (const auto& ex : schema.excluded)
            if (ex == meta.name) meta.excluded = true;
        if (meta.is_label) meta.excluded = true;

        auto& col = ds.columns_[c];
        auto& miss = ds.missing_[c];
        auto& lvls = ds.levels_[c];
        col.reserve(nrows);
        miss.reserve(nrows);

        for (std::size_t r = 1; r <= nrows; ++r) {
            const auto& cell = records[r][c];
            if (cell.empty() || is_sentinel(cell)) {
                col.push_back(std::numeric_limits<double>::quiet_NaN());
                miss.push_back(1);
                continue;
            }
            if (meta.kind == FeatureKind::Continuous) {
                double v;
                if (!detail::parse_double(cell, v)) {
                    throw Error("csv: non-numeric cell at row " + std::to_string(r) +
                                ", column '" + meta.name + "': '" + cell + "'");
                }
                col.push_back(v);
            } else {
                int code = -1;
                for (std::size_t lv = 0; lv < lvls.size(); ++lv)
                    if (lvls[lv] == cell) { code = static_cast<int>(lv); break; }
                if (code < 0) {
                    lvls.push_back(cell);
                    code = static_cast<int>(lvls.size() - 1);
                }
                col.push_back(code);
            }
            miss.push_back(0);
        }
        ds.features_[c] = std::move(meta);
        if (ds.features_[c].is_label) ds.label_index_ = static_cast<int>(c);
    }
    return ds;
}

inline Dataset ingest_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path.string());
    return ingest_csv(in, schema);
}

// Inverse of ingest_csv: missing cells become empty fields, continuous
// values use shortest round-trip formatting, categorical cells write their
// level strings.
inline void write_csv(const Dataset& ds, std::ostream& out) {
    std::vector<std::string> row;
    row.reserve(ds.features().size());
    for (const auto& f : ds.features()) row.push_back(f.name);
    csv::write_row(out, row);
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        row.clear();
        for (std::size_t c = 0; c < ds.features().size(); ++c) {
            if (ds.is_missing(static_cast<RowId>(r), c)) {
                row.emplace_back();
            } else if (ds.feature(c).kind == FeatureKind::Continuous) {
                row.push_back(detail::format_double(ds.value(static_cast<RowId>(r), c)));
            } else {
                row.push_back(ds.levels(c)[static_cast<std::size_t>(ds.value(static_cast<RowId>(r), c))]);
            }
        }
        csv::write_row(out, row);
    }
}

// Numeric view of a group: non-excluded continuous features as-is plus
// one-hot encodings of non-excluded categorical features. Missing cells are
// imputed by the column median over the group; columns with no present
// values are dropped with a recorded warning.
struct AnalysisMatrix {
    struct Column {
        int feature;       // index into dataset features
        int level;         // categorical level code, -1 for continuous
        std::string name;  // "feat" or "feat=level"
    };

    Matrix values;               // |group| x columns
    std::vector<RowId> row_ids;  // ascending group order
    std::vector<Column> columns;
    std::vector<std::string> warnings;
};

inline AnalysisMatrix analysis_matrix(const Dataset& ds, const Group& group) {
    if (group.empty()) throw Error("analysis_matrix: empty group");

    struct Raw {
        AnalysisMatrix::Column meta;
        std::vector<double> cells;  // NaN = missing
    };
    std::vector<Raw> raw;
    for (std::size_t c = 0; c < ds.features().size(); ++c) {
        const auto& f = ds.feature(c);
        if (f.excluded) continue;
        if (f.kind == FeatureKind::Continuous) {
            Raw col{{static_cast<int>(c), -1, f.name}, {}};
            col.cells.reserve(group.size());
            for (RowId r : group.rows)
                col.cells.push_back(ds.is_missing(r, c) ? std::numeric_limits<double>::quiet_NaN()
                                                        : ds.value(r, c));
            raw.push_back(std::move(col));
        } else {
            for (std::size_t lv = 0; lv < ds.levels(c).size(); ++lv) {
                Raw col{{static_cast<int>(c), static_cast<int>(lv),
                         f.name + "=" + ds.levels(c)[lv]},
                        {}};
                col.cells.reserve(group.size());
                for (RowId r : group.rows) {
                    if (ds.is_missing(r, c))
                        col.cells.push_back(std::numeric_limits<double>::quiet_NaN());
                    else
                        col.cells.push_back(ds.value(r, c) == static_cast<double>(lv) ? 1.0 : 0.0);
                }
                raw.push_back(std::move(col));
            }
        }
    }
    if (raw.empty()) throw Error("analysis_matrix: no usable (non-excluded) feature columns");

    AnalysisMatrix out;
    out.row_ids = group.rows;

    std::vector<const Raw*> kept;
    std::vector<double> medians;
    for (const auto& col : raw) {
        std::vector<double> present;
        present.reserve(col.cells.size());
        for (double v : col.cells)
            if (!std::isnan(v)) present.push_back(v);
        if (present.empty()) {
            out.warnings.push_back("column '" + col.meta.name +
                                   "' dropped: no present values in group");
            continue;
        }
        std::sort(present.begin(), present.end());
        const std::size_t n = present.size();
        const double median =
            (n % 2 == 1) ? present[n / 2] : 0.5 * (present[n / 2 - 1] + present[n / 2]);
        kept.push_back(&col);
        medians.push_back(median);
    }
    if (kept.empty()) throw Error("analysis_matrix: every usable column is entirely missing");

    out.values = Matrix(group.size(), kept.size());
    for (std::size_t j = 0; j < kept.size(); ++j) {
        out.columns.push_back(kept[j]->meta);
        for (std::size_t i = 0; i < group.size(); ++i) {
            const double v = kept[j]->cells[i];
            out.values.at(i, j) = std::isnan(v) ? medians[j] : v;
        }
    }
    return out;
}

// Fraction of each label level over the group members that carry a label.
inline std::map<std::string, double> label_distribution(const Dataset& ds, const Group& group) {
    if (ds.label_index() < 0) throw Error("label_distribution: dataset has no label column");
    if (group.empty()) throw Error("label_distribution: empty group");
    const auto col = static_cast<std::size_t>(ds.label_index());
    const auto& lvls = ds.levels(col);
    std::vector<std::size_t> counts(lvls.size(), 0);
    std::size_t present = 0;
    for (RowId r : group.rows) {
        if (ds.is_missing(r, col)) continue;
        ++counts[static_cast<std::size_t>(ds.value(r, col))];
        ++present;
    }
    std::map<std::string, double> out;
    if (present == 0) return out;
    for (std::size_t lv = 0; lv < lvls.size(); ++lv)
        out[lvls[lv]] = static_cast<double>(counts[lv]) / static_cast<double>(present);
    return out;
}

}  // namespace thd
