#include "netbound/andsim.hpp"

#include <algorithm>
#include <cstddef>
#include <stdexcept>

#include "json.hpp"
#include "netbound/error.hpp"
#include "netbound/kkk.hpp"

using nlohmann::ordered_json;

namespace netbound {

namespace {

constexpr std::size_t kMaxBox = std::size_t{1} << 20;

std::size_t box_size(std::size_t edges, int box) {
    std::size_t n = 1;
    for (std::size_t e = 0; e < edges; ++e) {
        if (n > kMaxBox / static_cast<std::size_t>(box))
            throw too_large("direction box exceeds 2^20 entries");
        n *= static_cast<std::size_t>(box);
    }
    return n;
}

// all products gain^d for v in acc and d in [0, box), edge by edge;
// the first edge becomes the slowest-moving digit
std::vector<mpq_class> monomial_values(const std::vector<mpq_class>& gains, int box,
                                       std::size_t total) {
    std::vector<mpq_class> acc;
    acc.reserve(total);
    acc.push_back(1);
    for (const mpq_class& g : gains) {
        std::vector<mpq_class> next;
        next.reserve(acc.size() * static_cast<std::size_t>(box));
        for (const mpq_class& v : acc) {
            mpq_class cur = v;
            next.push_back(cur);
            for (int d = 1; d < box; ++d) {
                cur *= g;
                cur.canonicalize();
                next.push_back(cur);
            }
        }
        acc = std::move(next);
    }
    return acc;
}

void check_distinct(const std::vector<mpq_class>& vals, const char* which) {
    std::vector<mpq_class> sorted = vals;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] == sorted[i - 1])
            throw Error(Error::Kind::DirectionCollision,
                        std::string("two ") + which + " directions evaluate to the same value");
}

void check_support_matches(const ExactMatrix& m, const SupportPattern& p, const char* hop) {
    for (int r = 0; r < p.rows; ++r)
        for (int c = 0; c < p.cols; ++c) {
            const bool nz = m.at(r, c) != 0;
            if (p.at(r, c) && !nz)
                throw Error(Error::Kind::ZeroGainOnSupport,
                            std::string(hop) + " hop has a zero gain on a support edge");
            if (!p.at(r, c) && nz)
                throw Error(Error::Kind::InvalidInput,
                            std::string(hop) + " hop has a gain off its support");
        }
}

}  // namespace

std::size_t DirectionTable::index_in_box(const std::vector<int>& m, int box) const {
    if (m.size() != edges.size())
        throw Error(Error::Kind::IndexOutOfBox, "exponent vector has the wrong length");
    std::size_t pos = 0;
    for (std::size_t e = 0; e < m.size(); ++e) {
        if (m[e] < 0 || m[e] >= box)
            throw Error(Error::Kind::IndexOutOfBox, "exponent outside the direction box");
        pos = pos * static_cast<std::size_t>(box) + static_cast<std::size_t>(m[e]);
    }
    return pos;
}

std::vector<int> DirectionTable::exponents_at(std::size_t pos, int box) const {
    std::vector<int> m(edges.size(), 0);
    for (std::size_t e = edges.size(); e-- > 0;) {
        m[e] = static_cast<int>(pos % static_cast<std::size_t>(box));
        pos /= static_cast<std::size_t>(box);
    }
    if (pos != 0) throw Error(Error::Kind::IndexOutOfBox, "position outside the direction box");
    return m;
}

DirectionTable build_directions(const KkkNetwork& net, int N) {
    if (net.K < 1) throw Error(Error::Kind::InvalidInput, "network has no pairs");
    if (net.mode != LayeredNetwork::Mode::Explicit)
        throw Error(Error::Kind::InvalidInput, "alignment needs explicit gains, not a bare support");
    if (net.field != FieldSpec::rational())
        throw Error(Error::Kind::WrongField, "alignment directions need rational gains");
    if (N < 1) throw Error(Error::Kind::InvalidInput, "direction exponents need N >= 1");
    if (N > 8) throw too_large("direction boxes beyond N = 8 are refused");

    check_support_matches(net.F1, net.support1, "first");
    check_support_matches(net.F2, net.support2, "second");

    if (!check_diagonalizable(net.support1, net.support2).ok)
        throw Error(Error::Kind::NotDiagonalizable,
                    "the two hop supports do not invert onto each other");

    ExactMatrix b;
    try {
        b = inverse(net.F2);
    } catch (const Error&) {
        throw Error(Error::Kind::NotDiagonalizable, "second hop is singular");
    }
    // the sampled gains themselves must keep the inverse on the first
    // hop's support, not just the pattern in the generic sense
    if (SupportPattern::of(b) != net.support1)
        throw Error(Error::Kind::NotDiagonalizable,
                    "inverted second hop leaves the first hop's support");

    DirectionTable t;
    t.K = net.K;
    t.N = N;
    for (int r = 0; r < net.K; ++r)
        for (int c = 0; c < net.K; ++c)
            if (net.support1.at(r, c)) {
                t.edges.emplace_back(c, r);
                t.gains.push_back(net.F1.at(r, c));
                t.inverse_gains.push_back(b.at(r, c));
            }

    const std::size_t trans_count = box_size(t.edges.size(), N);
    const std::size_t wide_count = box_size(t.edges.size(), N + 1);
    t.transmit = monomial_values(t.gains, N, trans_count);
    t.received = monomial_values(t.gains, N + 1, wide_count);
    t.relay = monomial_values(t.inverse_gains, N + 1, wide_count);

    check_distinct(t.received, "source");
    check_distinct(t.relay, "relay");
    return t;
}

std::vector<mpq_class> relay_map(const KkkNetwork& net, int N,
                                 const std::vector<std::vector<mpq_class>>& received) {
    const DirectionTable t = build_directions(net, N);
    const std::size_t wide = t.relay.size();
    if (received.size() != static_cast<std::size_t>(net.K))
        throw Error(Error::Kind::IndexOutOfBox, "one coefficient row per relay is required");
    for (const auto& row : received)
        if (row.size() != wide)
            throw Error(Error::Kind::IndexOutOfBox,
                        "coefficient rows must cover the whole relay box");

    std::vector<mpq_class> out(static_cast<std::size_t>(net.K), mpq_class(0));
    for (std::size_t j = 0; j < out.size(); ++j) {
        mpq_class sum = 0;
        for (std::size_t p = 0; p < wide; ++p)
            if (received[j][p] != 0) sum += t.relay[p] * received[j][p];
        sum.canonicalize();
        out[j] = sum;
    }
    return out;
}

EndToEndReport end_to_end_check(const KkkNetwork& net, int N,
                                const std::vector<std::vector<long>>& symbols) {
    EndToEndReport rep;
    rep.directions = build_directions(net, N);
    const DirectionTable& t = rep.directions;
    const std::size_t K = static_cast<std::size_t>(net.K);
    const std::size_t narrow = t.transmit.size();
    const std::size_t wide = t.relay.size();

    if (symbols.size() != K)
        throw Error(Error::Kind::InvalidInput, "one symbol row per stream is required");
    for (const auto& row : symbols)
        if (row.size() != narrow)
            throw Error(Error::Kind::InvalidInput,
                        "symbol rows must cover the whole transmit box");

    // what each source puts on the wire
    std::vector<mpq_class> x_src(K, mpq_class(0));
    for (std::size_t i = 0; i < K; ++i) {
        mpq_class sum = 0;
        for (std::size_t p = 0; p < narrow; ++p)
            if (symbols[i][p] != 0) sum += t.transmit[p] * symbols[i][p];
        sum.canonicalize();
        x_src[i] = sum;
    }

    // relay j hears sum_i F1[j][i] x_i; multiplying a transmit monomial
    // by an incident gain bumps that edge's exponent by one, so the same
    // signal reads as integer coefficients on the wider box
    std::vector<std::vector<mpq_class>> q(K, std::vector<mpq_class>(wide, mpq_class(0)));
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
        const std::size_t i = static_cast<std::size_t>(t.edges[e].first);
        const std::size_t j = static_cast<std::size_t>(t.edges[e].second);
        for (std::size_t p = 0; p < narrow; ++p) {
            if (symbols[i][p] == 0) continue;
            std::vector<int> m = t.exponents_at(p, N);
            m[e] += 1;
            q[j][t.index_in_box(m, N + 1)] += symbols[i][p];
        }
    }
    for (std::size_t j = 0; j < K; ++j) {
        mpq_class direct = 0;
        for (std::size_t i = 0; i < K; ++i)
            direct += net.F1.at(static_cast<int>(j), static_cast<int>(i)) * x_src[i];
        mpq_class decomposed = 0;
        for (std::size_t p = 0; p < wide; ++p)
            if (q[j][p] != 0) decomposed += t.received[p] * q[j][p];
        if (direct != decomposed)
            throw std::logic_error("relay decomposition disagrees with the received value");
    }

    const std::vector<mpq_class> x_relay = relay_map(net, N, q);

    // the same relay output, regrouped per transmit direction: the
    // inverse-entry factors absorb the exponent bumps back down
    std::vector<std::vector<mpq_class>> relay_coeff(K, std::vector<mpq_class>(narrow, mpq_class(0)));
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
        const std::size_t i = static_cast<std::size_t>(t.edges[e].first);
        const std::size_t j = static_cast<std::size_t>(t.edges[e].second);
        for (std::size_t p = 0; p < narrow; ++p)
            if (symbols[i][p] != 0) relay_coeff[j][p] += t.inverse_gains[e] * symbols[i][p];
    }
    for (std::size_t j = 0; j < K; ++j) {
        mpq_class regrouped = 0;
        for (std::size_t p = 0; p < narrow; ++p) {
            if (relay_coeff[j][p] == 0) continue;
            std::vector<int> m = t.exponents_at(p, N);
            regrouped += t.relay[t.index_in_box(m, N + 1)] * relay_coeff[j][p];
        }
        if (regrouped != x_relay[j])
            throw std::logic_error("regrouped relay signal disagrees with the relay map");
    }

    // destinations: numeric totals on one path, per-direction and
    // per-stream coefficients on the other, compared at the end
    rep.coefficient.assign(K, std::vector<mpq_class>(narrow, mpq_class(0)));
    rep.per_stream.assign(
        K, std::vector<std::vector<mpq_class>>(narrow, std::vector<mpq_class>(K, mpq_class(0))));
    rep.identity = true;
    for (std::size_t j = 0; j < K; ++j) {
        mpq_class y_direct = 0;
        for (std::size_t k = 0; k < K; ++k)
            y_direct += net.F2.at(static_cast<int>(j), static_cast<int>(k)) * x_relay[k];

        for (std::size_t p = 0; p < narrow; ++p) {
            mpq_class total = 0;
            for (std::size_t k = 0; k < K; ++k)
                total += net.F2.at(static_cast<int>(j), static_cast<int>(k)) * relay_coeff[k][p];
            total.canonicalize();
            rep.coefficient[j][p] = total;
            if (total != symbols[j][p]) rep.identity = false;
        }
        for (std::size_t e = 0; e < t.edges.size(); ++e) {
            const std::size_t i = static_cast<std::size_t>(t.edges[e].first);
            const std::size_t k = static_cast<std::size_t>(t.edges[e].second);
            const mpq_class w =
                net.F2.at(static_cast<int>(j), static_cast<int>(k)) * t.inverse_gains[e];
            for (std::size_t p = 0; p < narrow; ++p)
                if (symbols[i][p] != 0) rep.per_stream[j][p][i] += w * symbols[i][p];
        }
        mpq_class y_coeff = 0;
        for (std::size_t p = 0; p < narrow; ++p) {
            mpq_class split = 0;
            for (std::size_t i = 0; i < K; ++i) {
                rep.per_stream[j][p][i].canonicalize();
                split += rep.per_stream[j][p][i];
                if (i != j && rep.per_stream[j][p][i] != 0) rep.identity = false;
            }
            if (split != rep.coefficient[j][p])
                throw std::logic_error("per-stream split disagrees with the direction coefficient");
            std::vector<int> m = t.exponents_at(p, N);
            y_coeff += t.relay[t.index_in_box(m, N + 1)] * rep.coefficient[j][p];
        }
        if (y_coeff != y_direct)
            throw std::logic_error("destination decomposition disagrees with the received value");
    }
    return rep;
}

ExactMatrix sample_gains(const SupportPattern& p, Rng& rng) {
    ExactMatrix m = ExactMatrix::zero(FieldSpec::rational(), p.rows, p.cols);
    for (int r = 0; r < p.rows; ++r)
        for (int c = 0; c < p.cols; ++c)
            if (p.at(r, c)) {
                const long num = static_cast<long>(1 + rng.below(997));
                const long den = static_cast<long>(1 + rng.below(997));
                mpq_class g(num, den);
                g.canonicalize();
                m.at(r, c) = g;
            }
    return m;
}

std::string and_report_to_json_text(const EndToEndReport& r) {
    const DirectionTable& t = r.directions;
    ordered_json out;
    out["pairs"] = t.K;
    out["n"] = t.N;
    ordered_json edges = ordered_json::array();
    for (const auto& [i, j] : t.edges)
        edges.push_back(ordered_json::array(
            {"s" + std::to_string(i + 1), "u" + std::to_string(j + 1)}));
    out["edges"] = edges;
    out["transmit_directions"] = t.transmit.size();
    out["relay_directions"] = t.relay.size();
    ordered_json dirs = ordered_json::array();
    for (std::size_t p = 0; p < t.transmit.size(); ++p) {
        ordered_json d;
        d["m"] = t.exponents_at(p, t.N);
        d["value"] = t.transmit[p].get_str();
        dirs.push_back(d);
    }
    out["directions"] = dirs;
    out["identity"] = r.identity;
    ordered_json dests = ordered_json::array();
    for (std::size_t j = 0; j < r.coefficient.size(); ++j) {
        ordered_json d;
        d["name"] = "d" + std::to_string(j + 1);
        ordered_json coeffs = ordered_json::array();
        for (const mpq_class& c : r.coefficient[j]) coeffs.push_back(c.get_str());
        d["coefficients"] = coeffs;
        dests.push_back(d);
    }
    out["destinations"] = dests;
    return out.dump(2) + "\n";
}

}  // namespace netbound
