#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "netbound/error.hpp"

// Exact linear algebra over GF(p) and over the rationals, plus the
// combinatorial ("generic") rank of a zero/nonzero pattern.
//
// Prime-field elimination runs on uint64 copies of the entries (p fits in
// 31 bits, products in 64). Rational rank and determinant clear row
// denominators and run fraction-free (Bareiss) elimination on integers, so
// intermediate values stay divisions-exact; the inverse uses Gauss-Jordan
// directly in mpq, which is exact at the matrix sizes this library targets.
// Generic rank is maximum bipartite matching on the support, with a fixed
// ascending scan order so reported matchings are reproducible.

namespace netbound {

struct FieldSpec {
    enum class Kind { Prime, Rational };

    Kind kind = Kind::Prime;
    std::uint64_t p = 2;

    static FieldSpec prime(std::uint64_t p);
    static FieldSpec rational();

    bool operator==(const FieldSpec&) const = default;
};

struct ExactMatrix {
    FieldSpec field;
    int rows = 0;
    int cols = 0;
    std::vector<mpq_class> e;  // row-major, rows*cols entries

    static ExactMatrix zero(const FieldSpec& f, int rows, int cols);
    static ExactMatrix identity(const FieldSpec& f, int n);

    mpq_class& at(int r, int c) { return e[static_cast<std::size_t>(r) * cols + c]; }
    const mpq_class& at(int r, int c) const { return e[static_cast<std::size_t>(r) * cols + c]; }

    bool operator==(const ExactMatrix&) const = default;
};

struct SupportPattern {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> bits;  // row-major 0/1

    static SupportPattern zero(int rows, int cols);
    static SupportPattern identity(int n);
    static SupportPattern of(const ExactMatrix& m);

    std::uint8_t& at(int r, int c) { return bits[static_cast<std::size_t>(r) * cols + c]; }
    std::uint8_t at(int r, int c) const { return bits[static_cast<std::size_t>(r) * cols + c]; }

    bool operator==(const SupportPattern&) const = default;
};

// element arithmetic in the given field (entries must already be reduced)
mpq_class field_add(const FieldSpec& f, const mpq_class& a, const mpq_class& b);
mpq_class field_mul(const FieldSpec& f, const mpq_class& a, const mpq_class& b);
mpq_class field_neg(const FieldSpec& f, const mpq_class& a);
mpq_class field_inv(const FieldSpec& f, const mpq_class& a);
// canonical representative (mod-p reduction for prime fields)
mpq_class field_reduce(const FieldSpec& f, const mpq_class& a);

ExactMatrix multiply(const ExactMatrix& a, const ExactMatrix& b);
ExactMatrix transpose(const ExactMatrix& m);
ExactMatrix submatrix(const ExactMatrix& m, const std::vector<int>& row_idx,
                      const std::vector<int>& col_idx);

int rank(const ExactMatrix& m);
mpq_class determinant(const ExactMatrix& m);
ExactMatrix inverse(const ExactMatrix& m);
ExactMatrix cofactor_submatrix(const ExactMatrix& m, int drop_row, int drop_col);

SupportPattern transpose(const SupportPattern& p);
SupportPattern sub_pattern(const SupportPattern& p, const std::vector<int>& row_idx,
                           const std::vector<int>& col_idx);
SupportPattern drop_row_col(const SupportPattern& p, int drop_row, int drop_col);

int generic_rank(const SupportPattern& p);
bool has_perfect_matching(const SupportPattern& p);
// col index matched to each row, -1 if the row is unmatched
std::vector<int> maximum_matching(const SupportPattern& p);
int schwartz_zippel_rank(const SupportPattern& p, int trials, std::uint64_t prime,
                         std::uint64_t seed);

}  // namespace netbound
