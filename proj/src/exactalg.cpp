#include "netbound/exactalg.hpp"

#include <algorithm>
#include <functional>
#include <queue>

#include "netbound/rng.hpp"

namespace netbound {

namespace {

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

std::uint64_t invmod(std::uint64_t a, std::uint64_t p) { return powmod(a % p, p - 2, p); }

// entries of a prime-field matrix as machine words
std::vector<std::uint64_t> to_words(const ExactMatrix& m) {
    std::vector<std::uint64_t> w(m.e.size());
    for (std::size_t i = 0; i < m.e.size(); ++i) w[i] = mpz_get_ui(m.e[i].get_num_mpz_t());
    return w;
}

// row-echelon reduction mod p; returns rank, optionally the determinant
int eliminate_mod(std::vector<std::uint64_t>& a, int rows, int cols, std::uint64_t p,
                  std::uint64_t* det_out) {
    std::uint64_t det = 1 % p;
    int rk = 0;
    for (int c = 0; c < cols && rk < rows; ++c) {
        int pivot = -1;
        for (int r = rk; r < rows; ++r)
            if (a[static_cast<std::size_t>(r) * cols + c] != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) {
            if (det_out) det = 0;
            continue;
        }
        if (pivot != rk) {
            for (int j = 0; j < cols; ++j)
                std::swap(a[static_cast<std::size_t>(pivot) * cols + j],
                          a[static_cast<std::size_t>(rk) * cols + j]);
            det = p - det;
            if (det == p) det = 0;
        }
        const std::uint64_t pv = a[static_cast<std::size_t>(rk) * cols + c];
        det = mulmod(det, pv, p);
        const std::uint64_t pv_inv = invmod(pv, p);
        for (int r = rk + 1; r < rows; ++r) {
            const std::uint64_t f = a[static_cast<std::size_t>(r) * cols + c];
            if (f == 0) continue;
            const std::uint64_t scale = mulmod(f, pv_inv, p);
            for (int j = c; j < cols; ++j) {
                std::uint64_t& x = a[static_cast<std::size_t>(r) * cols + j];
                const std::uint64_t sub = mulmod(scale, a[static_cast<std::size_t>(rk) * cols + j], p);
                x = (x + p - sub) % p;
            }
        }
        ++rk;
    }
    if (det_out) *det_out = (rk == rows && rows == cols) ? det : 0;
    return rk;
}

// clears denominators row by row; scale picks up the product of the row factors
std::vector<mpz_class> to_scaled_integers(const ExactMatrix& m, mpz_class& scale) {
    std::vector<mpz_class> a(m.e.size());
    scale = 1;
    for (int r = 0; r < m.rows; ++r) {
        mpz_class l = 1;
        for (int c = 0; c < m.cols; ++c) {
            mpz_class den(m.at(r, c).get_den());
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), l.get_mpz_t(), den.get_mpz_t());
            l = l / g * den;
        }
        scale *= l;
        for (int c = 0; c < m.cols; ++c) {
            mpq_class v = m.at(r, c) * mpq_class(l);
            v.canonicalize();
            a[static_cast<std::size_t>(r) * m.cols + c] = v.get_num();
        }
    }
    return a;
}

// fraction-free elimination; every division is exact by the previous pivot
int bareiss(std::vector<mpz_class>& a, int rows, int cols, mpz_class* det_out) {
    mpz_class prev = 1;
    int sign = 1;
    int rk = 0;
    bool skipped = false;
    for (int c = 0; c < cols && rk < rows; ++c) {
        int pivot = -1;
        for (int r = rk; r < rows; ++r)
            if (a[static_cast<std::size_t>(r) * cols + c] != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) {
            skipped = true;
            continue;
        }
        if (pivot != rk) {
            for (int j = 0; j < cols; ++j)
                std::swap(a[static_cast<std::size_t>(pivot) * cols + j],
                          a[static_cast<std::size_t>(rk) * cols + j]);
            sign = -sign;
        }
        const mpz_class pv = a[static_cast<std::size_t>(rk) * cols + c];
        for (int r = rk + 1; r < rows; ++r) {
            for (int j = c + 1; j < cols; ++j) {
                mpz_class& x = a[static_cast<std::size_t>(r) * cols + j];
                x = pv * x - a[static_cast<std::size_t>(r) * cols + c] *
                                 a[static_cast<std::size_t>(rk) * cols + j];
                mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), prev.get_mpz_t());
            }
            a[static_cast<std::size_t>(r) * cols + c] = 0;
        }
        prev = pv;
        ++rk;
    }
    if (det_out) {
        if (rows != cols || rk < rows || skipped)
            *det_out = 0;
        else
            *det_out = sign > 0 ? prev : mpz_class(-prev);
    }
    return rk;
}

}  // namespace

FieldSpec FieldSpec::prime(std::uint64_t p) {
    if (!is_prime_u64(p)) throw Error(Error::Kind::InvalidInput, "field modulus is not prime");
    FieldSpec f;
    f.kind = Kind::Prime;
    f.p = p;
    return f;
}

FieldSpec FieldSpec::rational() {
    FieldSpec f;
    f.kind = Kind::Rational;
    f.p = 0;
    return f;
}

ExactMatrix ExactMatrix::zero(const FieldSpec& f, int rows, int cols) {
    ExactMatrix m;
    m.field = f;
    m.rows = rows;
    m.cols = cols;
    m.e.assign(static_cast<std::size_t>(rows) * cols, mpq_class(0));
    return m;
}

ExactMatrix ExactMatrix::identity(const FieldSpec& f, int n) {
    ExactMatrix m = zero(f, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

SupportPattern SupportPattern::zero(int rows, int cols) {
    SupportPattern p;
    p.rows = rows;
    p.cols = cols;
    p.bits.assign(static_cast<std::size_t>(rows) * cols, 0);
    return p;
}

SupportPattern SupportPattern::identity(int n) {
    SupportPattern p = zero(n, n);
    for (int i = 0; i < n; ++i) p.at(i, i) = 1;
    return p;
}

SupportPattern SupportPattern::of(const ExactMatrix& m) {
    SupportPattern p = zero(m.rows, m.cols);
    for (std::size_t i = 0; i < m.e.size(); ++i) p.bits[i] = (m.e[i] != 0);
    return p;
}

mpq_class field_reduce(const FieldSpec& f, const mpq_class& a) {
    if (f.kind == FieldSpec::Kind::Rational) {
        mpq_class v = a;
        v.canonicalize();
        return v;
    }
    mpq_class v = a;
    v.canonicalize();
    if (v.get_den() != 1)
        throw Error(Error::Kind::InvalidInput, "prime-field entry with a denominator");
    mpz_class r;
    mpz_class p(static_cast<unsigned long>(f.p));
    mpz_mod(r.get_mpz_t(), v.get_num().get_mpz_t(), p.get_mpz_t());
    return mpq_class(r);
}

mpq_class field_add(const FieldSpec& f, const mpq_class& a, const mpq_class& b) {
    return field_reduce(f, a + b);
}

mpq_class field_mul(const FieldSpec& f, const mpq_class& a, const mpq_class& b) {
    return field_reduce(f, a * b);
}

mpq_class field_neg(const FieldSpec& f, const mpq_class& a) { return field_reduce(f, -a); }

mpq_class field_inv(const FieldSpec& f, const mpq_class& a) {
    if (a == 0) throw Error(Error::Kind::Singular, "inverse of zero");
    if (f.kind == FieldSpec::Kind::Rational) return mpq_class(1) / a;
    const std::uint64_t v = mpz_get_ui(a.get_num_mpz_t());
    return mpq_class(static_cast<unsigned long>(invmod(v, f.p)));
}

ExactMatrix multiply(const ExactMatrix& a, const ExactMatrix& b) {
    if (a.cols != b.rows) throw Error(Error::Kind::IndexOutOfRange, "dimension mismatch");
    ExactMatrix out = ExactMatrix::zero(a.field, a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            if (a.at(i, k) == 0) continue;
            for (int j = 0; j < b.cols; ++j) out.at(i, j) += a.at(i, k) * b.at(k, j);
        }
    for (auto& x : out.e) x = field_reduce(a.field, x);
    return out;
}

ExactMatrix transpose(const ExactMatrix& m) {
    ExactMatrix out = ExactMatrix::zero(m.field, m.cols, m.rows);
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) out.at(c, r) = m.at(r, c);
    return out;
}

ExactMatrix submatrix(const ExactMatrix& m, const std::vector<int>& row_idx,
                      const std::vector<int>& col_idx) {
    ExactMatrix out = ExactMatrix::zero(m.field, static_cast<int>(row_idx.size()),
                                        static_cast<int>(col_idx.size()));
    for (std::size_t r = 0; r < row_idx.size(); ++r)
        for (std::size_t c = 0; c < col_idx.size(); ++c) {
            if (row_idx[r] < 0 || row_idx[r] >= m.rows || col_idx[c] < 0 || col_idx[c] >= m.cols)
                throw Error(Error::Kind::IndexOutOfRange, "submatrix index out of range");
            out.at(static_cast<int>(r), static_cast<int>(c)) = m.at(row_idx[r], col_idx[c]);
        }
    return out;
}

int rank(const ExactMatrix& m) {
    if (m.rows == 0 || m.cols == 0) return 0;
    if (m.field.kind == FieldSpec::Kind::Prime) {
        std::vector<std::uint64_t> a = to_words(m);
        return eliminate_mod(a, m.rows, m.cols, m.field.p, nullptr);
    }
    mpz_class scale;
    std::vector<mpz_class> a = to_scaled_integers(m, scale);
    return bareiss(a, m.rows, m.cols, nullptr);
}

mpq_class determinant(const ExactMatrix& m) {
    if (m.rows != m.cols) throw Error(Error::Kind::NonSquare, "determinant of non-square matrix");
    if (m.rows == 0) return mpq_class(1);
    if (m.field.kind == FieldSpec::Kind::Prime) {
        std::vector<std::uint64_t> a = to_words(m);
        std::uint64_t det = 0;
        eliminate_mod(a, m.rows, m.cols, m.field.p, &det);
        return mpq_class(static_cast<unsigned long>(det));
    }
    mpz_class scale;
    std::vector<mpz_class> a = to_scaled_integers(m, scale);
    mpz_class det;
    bareiss(a, m.rows, m.cols, &det);
    mpq_class out(det, scale);
    out.canonicalize();
    return out;
}

ExactMatrix inverse(const ExactMatrix& m) {
    if (m.rows != m.cols) throw Error(Error::Kind::NonSquare, "inverse of non-square matrix");
    const int n = m.rows;
    // Gauss-Jordan on [m | I]
    ExactMatrix a = m;
    ExactMatrix inv = ExactMatrix::identity(m.field, n);
    for (int c = 0; c < n; ++c) {
        int pivot = -1;
        for (int r = c; r < n; ++r)
            if (a.at(r, c) != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) throw Error(Error::Kind::Singular, "matrix is singular");
        if (pivot != c)
            for (int j = 0; j < n; ++j) {
                std::swap(a.at(pivot, j), a.at(c, j));
                std::swap(inv.at(pivot, j), inv.at(c, j));
            }
        const mpq_class pv_inv = field_inv(m.field, a.at(c, c));
        for (int j = 0; j < n; ++j) {
            a.at(c, j) = field_mul(m.field, a.at(c, j), pv_inv);
            inv.at(c, j) = field_mul(m.field, inv.at(c, j), pv_inv);
        }
        for (int r = 0; r < n; ++r) {
            if (r == c || a.at(r, c) == 0) continue;
            const mpq_class f = a.at(r, c);
            for (int j = 0; j < n; ++j) {
                a.at(r, j) = field_reduce(m.field, a.at(r, j) - f * a.at(c, j));
                inv.at(r, j) = field_reduce(m.field, inv.at(r, j) - f * inv.at(c, j));
            }
        }
    }
    return inv;
}

ExactMatrix cofactor_submatrix(const ExactMatrix& m, int drop_row, int drop_col) {
    if (m.rows != m.cols) throw Error(Error::Kind::NonSquare, "cofactor of non-square matrix");
    if (drop_row < 0 || drop_row >= m.rows || drop_col < 0 || drop_col >= m.cols)
        throw Error(Error::Kind::IndexOutOfRange, "cofactor index out of range");
    std::vector<int> ri, ci;
    for (int r = 0; r < m.rows; ++r)
        if (r != drop_row) ri.push_back(r);
    for (int c = 0; c < m.cols; ++c)
        if (c != drop_col) ci.push_back(c);
    return submatrix(m, ri, ci);
}

SupportPattern transpose(const SupportPattern& p) {
    SupportPattern out = SupportPattern::zero(p.cols, p.rows);
    for (int r = 0; r < p.rows; ++r)
        for (int c = 0; c < p.cols; ++c) out.at(c, r) = p.at(r, c);
    return out;
}

SupportPattern sub_pattern(const SupportPattern& p, const std::vector<int>& row_idx,
                           const std::vector<int>& col_idx) {
    SupportPattern out = SupportPattern::zero(static_cast<int>(row_idx.size()),
                                              static_cast<int>(col_idx.size()));
    for (std::size_t r = 0; r < row_idx.size(); ++r)
        for (std::size_t c = 0; c < col_idx.size(); ++c)
            out.at(static_cast<int>(r), static_cast<int>(c)) = p.at(row_idx[r], col_idx[c]);
    return out;
}

SupportPattern drop_row_col(const SupportPattern& p, int drop_row, int drop_col) {
    std::vector<int> ri, ci;
    for (int r = 0; r < p.rows; ++r)
        if (r != drop_row) ri.push_back(r);
    for (int c = 0; c < p.cols; ++c)
        if (c != drop_col) ci.push_back(c);
    return sub_pattern(p, ri, ci);
}

std::vector<int> maximum_matching(const SupportPattern& p) {
    // Hopcroft-Karp; rows on the left, columns on the right, all scans in
    // ascending index order so the result is stable
    const int n = p.rows, m = p.cols;
    std::vector<int> match_row(n, -1), match_col(m, -1);
    std::vector<int> dist(n);
    const int INF = n + m + 1;

    auto bfs = [&]() {
        std::queue<int> q;
        bool reachable_free = false;
        for (int r = 0; r < n; ++r) {
            if (match_row[r] < 0) {
                dist[r] = 0;
                q.push(r);
            } else {
                dist[r] = INF;
            }
        }
        while (!q.empty()) {
            const int r = q.front();
            q.pop();
            for (int c = 0; c < m; ++c) {
                if (!p.at(r, c)) continue;
                const int r2 = match_col[c];
                if (r2 < 0) {
                    reachable_free = true;
                } else if (dist[r2] == INF) {
                    dist[r2] = dist[r] + 1;
                    q.push(r2);
                }
            }
        }
        return reachable_free;
    };

    std::function<bool(int)> dfs = [&](int r) {
        for (int c = 0; c < m; ++c) {
            if (!p.at(r, c)) continue;
            const int r2 = match_col[c];
            if (r2 < 0 || (dist[r2] == dist[r] + 1 && dfs(r2))) {
                match_row[r] = c;
                match_col[c] = r;
                return true;
            }
        }
        dist[r] = INF;
        return false;
    };

    while (bfs()) {
        for (int r = 0; r < n; ++r)
            if (match_row[r] < 0) dfs(r);
    }
    return match_row;
}

int generic_rank(const SupportPattern& p) {
    if (p.rows == 0 || p.cols == 0) return 0;
    const std::vector<int> m = maximum_matching(p);
    int size = 0;
    for (int c : m) size += (c >= 0);
    return size;
}

bool has_perfect_matching(const SupportPattern& p) {
    return p.rows == p.cols && generic_rank(p) == p.rows;
}

int schwartz_zippel_rank(const SupportPattern& p, int trials, std::uint64_t prime,
                         std::uint64_t seed) {
    if (p.rows == 0 || p.cols == 0) return 0;
    Rng rng(seed);
    int best = 0;
    for (int t = 0; t < trials; ++t) {
        std::vector<std::uint64_t> a(p.bits.size(), 0);
        for (std::size_t i = 0; i < p.bits.size(); ++i)
            if (p.bits[i]) a[i] = 1 + rng.below(prime - 1);
        best = std::max(best, eliminate_mod(a, p.rows, p.cols, prime, nullptr));
    }
    return best;
}

}  // namespace netbound
