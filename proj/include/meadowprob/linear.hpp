#pragma once

#include "meadowprob/stalk.hpp"

#include <string>
#include <vector>

namespace meadowprob {

/// coeffs . u >= rhs, or strictly greater when `strict` is set.
struct LinRow {
    std::vector<Stalk> coeffs;
    Stalk rhs;
    bool strict = false;

    friend bool operator==(const LinRow&, const LinRow&) = default;
};

/// coeffs . u = rhs.
struct EqRow {
    std::vector<Stalk> coeffs;
    Stalk rhs;

    friend bool operator==(const EqRow&, const EqRow&) = default;
};

struct LinearSystem {
    std::vector<std::string> vars;
    std::vector<EqRow> equalities;
    std::vector<LinRow> inequalities;
};

std::string format_row(const std::vector<std::string>& vars, const LinRow& row);
std::string format_eq(const std::vector<std::string>& vars, const EqRow& row);

/// constant + coeffs . u as a readable sum, e.g. "1 - u01 - u10".
std::string format_affine(const std::vector<std::string>& vars,
                          const std::vector<Stalk>& coeffs, const Stalk& constant);

} // namespace meadowprob
