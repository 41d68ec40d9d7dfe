#include "netbound/oracle.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_set>

#include "netbound/error.hpp"

namespace netbound {

namespace {

int oracle_rank(const LayeredNetwork& net, int hop, const std::vector<int>& rows,
                const std::vector<int>& cols) {
    if (net.mode == LayeredNetwork::Mode::Generic)
        return generic_rank(sub_pattern(net.supports[hop], rows, cols));
    return rank(submatrix(net.hops[hop], rows, cols));
}

bool dyadic_unit(const mpq_class& q, unsigned long& k) {
    if (q.get_num() != 1) return false;
    if (mpz_popcount(q.get_den().get_mpz_t()) != 1) return false;
    k = mpz_sizeinbase(q.get_den().get_mpz_t(), 2) - 1;
    return true;
}

struct PlainEntropy {
    bool exact = true;
    mpq_class bits;
    long double approx = 0.0L;
};

PlainEntropy table_entropy(const std::map<std::vector<int>, mpq_class>& table) {
    PlainEntropy h;
    long double approx = 0.0L;
    for (const auto& [key, q] : table) {
        if (q == 0) continue;
        unsigned long k = 0;
        if (h.exact && dyadic_unit(q, k))
            h.bits += q * mpq_class(k);
        else
            h.exact = false;
        const long double d = static_cast<long double>(mpq_get_d(q.get_mpq_t()));
        approx -= d * std::log2(d);
    }
    h.approx = h.exact ? static_cast<long double>(mpq_get_d(h.bits.get_mpq_t())) : approx;
    return h;
}

}  // namespace

OracleResult exhaustive_linear_kkk(const KkkNetwork& net) {
    if (net.field.kind != FieldSpec::Kind::Prime || net.field.p != 2)
        throw Error(Error::Kind::WrongField, "the relay-map sweep works over GF(2)");
    if (net.K > 3) throw too_large("relay-map sweep is limited to 3 pairs");

    const int K = net.K;
    const int bits = K * K;
    const FieldSpec f = net.field;
    const ExactMatrix ident = ExactMatrix::identity(f, K);

    OracleResult out;
    out.enumerated = 1ull << bits;
    for (std::uint64_t mask = 0; mask < (1ull << bits); ++mask) {
        // relays cannot see each other's signals, so only diagonal
        // assignments correspond to a scheme the network can run
        bool realizable = true;
        for (int r = 0; r < K && realizable; ++r)
            for (int c = 0; c < K; ++c)
                if (r != c && (mask >> (r * K + c) & 1)) {
                    realizable = false;
                    break;
                }
        if (!realizable) continue;

        ExactMatrix g = ExactMatrix::zero(f, K, K);
        for (int r = 0; r < K; ++r)
            for (int c = 0; c < K; ++c)
                if (mask >> (r * K + c) & 1) g.at(r, c) = 1;

        if (!out.verdict && multiply(multiply(net.F2, g), net.F1) == ident) {
            out.verdict = true;
            out.witness = g;
        }
    }
    out.note = "tried every one-shot linear relay assignment";
    return out;
}

BoundReport exhaustive_pair_search(const LayeredNetwork& net) {
    net.validate();
    int total = 0;
    for (const auto& layer : net.layers) total += static_cast<int>(layer.size());
    if (total > 12) throw too_large("direct cut enumeration is limited to 12 nodes");

    const int r = net.num_layers();
    const int K = net.K;
    std::vector<std::pair<int, int>> flat;  // global index -> (layer, position)
    for (int t = 0; t < r; ++t)
        for (int i = 0; i < static_cast<int>(net.layers[t].size()); ++i) flat.emplace_back(t, i);

    std::uint32_t source_mask = 0, dest_mask = 0;
    for (int v = 0; v < total; ++v) {
        if (flat[v].first == 0) source_mask |= 1u << v;
        if (flat[v].first == r - 1) dest_mask |= 1u << v;
    }
    const std::uint32_t rest_mask = ((1u << total) - 1) & ~source_mask;
    const std::uint32_t relay_mask = rest_mask & ~dest_mask;

    auto value_of = [&](std::uint32_t om, std::uint32_t th) {
        std::vector<std::uint32_t> om_layer(r, 0), th_layer(r, 0);
        for (int v = 0; v < total; ++v) {
            if (om >> v & 1) om_layer[flat[v].first] |= 1u << flat[v].second;
            if (th >> v & 1) th_layer[flat[v].first] |= 1u << flat[v].second;
        }
        int value = 0;
        for (int t = 0; t + 1 < r; ++t) {
            std::vector<int> cols_om, cols_th, rows_omc, rows_thc;
            for (int i = 0; i < static_cast<int>(net.layers[t].size()); ++i) {
                if (om_layer[t] >> i & 1) cols_om.push_back(i);
                if (th_layer[t] >> i & 1) cols_th.push_back(i);
            }
            for (int i = 0; i < static_cast<int>(net.layers[t + 1].size()); ++i) {
                if (!(om_layer[t + 1] >> i & 1)) rows_omc.push_back(i);
                if (!(th_layer[t + 1] >> i & 1)) rows_thc.push_back(i);
            }
            value += oracle_rank(net, t, rows_omc, cols_om) +
                     oracle_rank(net, t, rows_thc, cols_th) -
                     oracle_rank(net, t, rows_omc, cols_th);
        }
        return value;
    };

    // digit string over all nodes, layer by layer, for tie-breaking
    auto encoding_of = [&](std::uint32_t om, std::uint32_t th) {
        std::vector<std::uint64_t> enc;
        for (int t = 0; t < r; ++t) {
            std::uint64_t key = 0;
            for (int v = 0; v < total; ++v) {
                if (flat[v].first != t) continue;
                key = key * 3 + ((th >> v & 1) ? 2u : (om >> v & 1) ? 1u : 0u);
            }
            enc.push_back(key);
        }
        return enc;
    };

    SearchStats stats;
    bool have = false;
    int best_value = 0;
    std::uint32_t best_om = 0, best_th = 0;
    std::vector<std::uint64_t> best_enc;

    // omega always holds every source; walk its optional part
    for (std::uint32_t extra = rest_mask;; extra = (extra - 1) & rest_mask) {
        const std::uint32_t om = source_mask | extra;
        // destinations inside omega dictate the sources inside theta
        std::uint32_t forced = 0;
        for (int k = 0; k < K; ++k)
            if (om >> (total - K + k) & 1) forced |= 1u << k;
        const std::uint32_t free_th = om & relay_mask;
        for (std::uint32_t sub = free_th;; sub = (sub - 1) & free_th) {
            const std::uint32_t th = forced | sub;
            ++stats.candidates;
            const int value = value_of(om, th);
            std::vector<std::uint64_t> enc = encoding_of(om, th);
            if (!have || value < best_value || (value == best_value && enc < best_enc)) {
                have = true;
                best_value = value;
                best_om = om;
                best_th = th;
                best_enc = std::move(enc);
            }
            if (sub == 0) break;
        }
        if (extra == 0) break;
    }

    std::vector<std::string> om_nodes, th_nodes;
    for (int v = 0; v < total; ++v) {
        const auto [t, i] = flat[v];
        if (best_om >> v & 1) om_nodes.push_back(net.layers[t][i]);
        if (best_th >> v & 1) th_nodes.push_back(net.layers[t][i]);
    }
    BoundReport rep = eval_pair_bound(net, {om_nodes, th_nodes});
    if (rep.value != best_value)
        throw std::logic_error("enumerated cut value disagrees with its witness");
    rep.stats = stats;
    return rep;
}

OracleResult exhaustive_entropy(
    const TinyJointDistribution& base, const std::vector<std::string>& derived_names,
    const std::vector<int>& derived_sizes,
    const std::function<std::vector<int>(const std::vector<int>&)>& derive,
    const std::vector<std::string>& target, const std::vector<std::string>& given) {
    base.validate();
    if (derived_names.size() != derived_sizes.size())
        throw Error(Error::Kind::InvalidInput, "one size per derived variable required");
    if (base.num_states() > (1u << 16)) throw too_large("base state space exceeds 2^16");

    std::vector<std::string> all_names = base.names;
    all_names.insert(all_names.end(), derived_names.begin(), derived_names.end());
    std::unordered_set<std::string> uniq(all_names.begin(), all_names.end());
    if (uniq.size() != all_names.size())
        throw Error(Error::Kind::InvalidInput, "derived names collide with base names");

    auto var_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < all_names.size(); ++i)
            if (all_names[i] == name) return static_cast<int>(i);
        throw Error(Error::Kind::InvalidInput, "no variable named " + name);
    };
    std::vector<int> tg, gv;
    for (const auto& n : target) tg.push_back(var_index(n));
    for (const auto& n : given) gv.push_back(var_index(n));

    std::map<std::vector<int>, mpq_class> table_both, table_given;
    std::vector<int> values(base.sizes.size(), 0);
    OracleResult out;
    for (std::size_t idx = 0; idx < base.num_states(); ++idx) {
        ++out.enumerated;
        if (base.p[idx] != 0) {
            std::vector<int> full = values;
            std::vector<int> extra = derive(values);
            if (extra.size() != derived_sizes.size())
                throw Error(Error::Kind::InvalidInput, "derive returned the wrong arity");
            for (std::size_t d = 0; d < extra.size(); ++d)
                if (extra[d] < 0 || extra[d] >= derived_sizes[d])
                    throw Error(Error::Kind::IndexOutOfRange, "derived value out of range");
            full.insert(full.end(), extra.begin(), extra.end());

            std::vector<int> key_given, key_both;
            for (int v : gv) key_given.push_back(full[v]);
            key_both = key_given;
            for (int v : tg) key_both.push_back(full[v]);
            table_both[key_both] += base.p[idx];
            table_given[key_given] += base.p[idx];
        }
        for (int v = static_cast<int>(values.size()) - 1; v >= 0; --v) {
            if (++values[v] < base.sizes[v]) break;
            values[v] = 0;
        }
    }

    const PlainEntropy both = table_entropy(table_both);
    const PlainEntropy part = table_entropy(table_given);
    out.exact = both.exact && part.exact;
    long double approx = both.approx - part.approx;
    if (out.exact) {
        out.value = both.bits - part.bits;
        approx = static_cast<long double>(mpq_get_d(out.value.get_mpq_t()));
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15Lf", approx);
    out.decimal = buf;
    out.note = "summed the full joint table";
    return out;
}

}  // namespace netbound
