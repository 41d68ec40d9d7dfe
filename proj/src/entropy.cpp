#include "netbound/entropy.hpp"

#include <cmath>
#include <map>
#include <unordered_set>

#include "netbound/error.hpp"

namespace netbound {

namespace {

// a probability is "nice" when it is 1 / 2^k; only then does its
// -p log2 p contribution stay rational
bool is_reciprocal_power_of_two(const mpq_class& q, unsigned long& k) {
    if (q.get_num() != 1) return false;
    const mpz_class& den = q.get_den();
    if (mpz_popcount(den.get_mpz_t()) != 1) return false;
    k = mpz_sizeinbase(den.get_mpz_t(), 2) - 1;
    return true;
}

EntropyValue entropy_of(const std::map<std::vector<int>, mpq_class>& table) {
    EntropyValue h;
    h.exact = true;
    h.bits = 0;
    long double approx = 0.0L;
    for (const auto& [key, q] : table) {
        if (q == 0) continue;
        unsigned long k = 0;
        if (h.exact && is_reciprocal_power_of_two(q, k))
            h.bits += q * mpq_class(static_cast<unsigned long>(k));
        else
            h.exact = false;
        const long double d = static_cast<long double>(mpq_get_d(q.get_mpq_t()));
        approx -= d * std::log2(d);
    }
    h.approx = h.exact ? static_cast<long double>(mpq_get_d(h.bits.get_mpq_t())) : approx;
    if (!h.exact) h.bits = 0;
    return h;
}

EntropyValue difference(const EntropyValue& whole, const EntropyValue& part) {
    EntropyValue h;
    h.exact = whole.exact && part.exact;
    if (h.exact) {
        h.bits = whole.bits - part.bits;
        h.approx = static_cast<long double>(mpq_get_d(h.bits.get_mpq_t()));
    } else {
        h.approx = whole.approx - part.approx;
    }
    return h;
}

}  // namespace

EntropyValue conditional_entropy(const TinyJointDistribution& joint, std::vector<int> target,
                                 std::vector<int> given) {
    joint.validate();
    if (joint.num_states() > (1u << 20))
        throw too_large("joint table too big for entropy evaluation");
    const int nvars = static_cast<int>(joint.sizes.size());
    for (int v : target)
        if (v < 0 || v >= nvars)
            throw Error(Error::Kind::IndexOutOfRange, "target variable out of range");
    for (int v : given)
        if (v < 0 || v >= nvars)
            throw Error(Error::Kind::IndexOutOfRange, "given variable out of range");

    std::vector<int> both = target;
    both.insert(both.end(), given.begin(), given.end());

    std::map<std::vector<int>, mpq_class> table_both, table_given;
    std::vector<int> values(joint.sizes.size(), 0);
    for (std::size_t idx = 0; idx < joint.num_states(); ++idx) {
        if (joint.p[idx] != 0) {
            std::vector<int> key_both, key_given;
            for (int v : both) key_both.push_back(values[v]);
            for (int v : given) key_given.push_back(values[v]);
            table_both[key_both] += joint.p[idx];
            table_given[key_given] += joint.p[idx];
        }
        for (int v = nvars - 1; v >= 0; --v) {
            if (++values[v] < joint.sizes[v]) break;
            values[v] = 0;
        }
    }
    return difference(entropy_of(table_both), entropy_of(table_given));
}

std::vector<EntropyValue> entropy_bound_terms(const LayeredNetwork& net, const CutChain& chain,
                                              const TinyJointDistribution& dist) {
    net.validate();
    if (net.field.kind != FieldSpec::Kind::Prime)
        throw Error(Error::Kind::WrongField, "entropy evaluation needs a prime field");
    if (net.mode != LayeredNetwork::Mode::Explicit)
        throw Error(Error::Kind::InvalidInput, "entropy evaluation needs explicit gains");

    CutCheck check = validate_cut_chain(net, chain);
    if (!check.ok) {
        std::string msg = "chain rejected:";
        for (const auto& v : check.violations) msg += " " + v + ";";
        throw Error(Error::Kind::InvalidChain, msg);
    }

    const int r = net.num_layers();
    std::vector<std::pair<int, int>> transmit;  // (layer, position), layers 0..r-2
    for (int t = 0; t + 1 < r; ++t)
        for (int i = 0; i < static_cast<int>(net.layers[t].size()); ++i)
            transmit.emplace_back(t, i);
    std::vector<std::pair<int, int>> receive;  // layers 1..r-1
    for (int t = 1; t < r; ++t)
        for (int i = 0; i < static_cast<int>(net.layers[t].size()); ++i)
            receive.emplace_back(t, i);

    dist.validate();
    if (dist.names.size() != transmit.size())
        throw Error(Error::Kind::InvalidInput,
                    "distribution must have one variable per transmit node");
    for (std::size_t v = 0; v < transmit.size(); ++v) {
        const auto [t, i] = transmit[v];
        if (dist.names[v] != net.layers[t][i])
            throw Error(Error::Kind::InvalidInput,
                        "distribution variables must follow the transmit nodes in layer order");
        if (dist.sizes[v] != static_cast<int>(net.field.p))
            throw Error(Error::Kind::InvalidInput,
                        "each transmit variable carries one field symbol");
    }
    if (dist.num_states() > (1u << 16)) throw too_large("transmit state space exceeds 2^16");

    // machine-word copy of each hop for the inner evaluation loop
    std::vector<std::vector<std::uint64_t>> hop_words;
    for (const auto& h : net.hops) {
        std::vector<std::uint64_t> w(h.e.size());
        for (std::size_t i = 0; i < h.e.size(); ++i)
            w[i] = mpz_get_ui(h.e[i].get_num_mpz_t());
        hop_words.push_back(std::move(w));
    }

    const int ell = static_cast<int>(chain.cuts.size());
    std::vector<std::unordered_set<std::string>> cuts;
    for (const auto& c : chain.cuts) cuts.emplace_back(c.begin(), c.end());
    auto outside = [&](int j, const std::string& name) {
        if (j <= 0) return false;  // the zeroth cut is the whole node set
        return cuts[j - 1].count(name) == 0;
    };

    // per term: which receive nodes are targets, which transmit and
    // receive nodes are conditioned on
    struct TermVars {
        std::vector<int> target_rx, given_tx, given_rx;
    };
    std::vector<TermVars> vars(ell);
    for (int j = 1; j <= ell; ++j) {
        for (int v = 0; v < static_cast<int>(receive.size()); ++v) {
            const auto [t, i] = receive[v];
            if (outside(j, net.layers[t][i])) vars[j - 1].target_rx.push_back(v);
            if (outside(j - 1, net.layers[t][i])) vars[j - 1].given_rx.push_back(v);
        }
        for (int v = 0; v < static_cast<int>(transmit.size()); ++v) {
            const auto [t, i] = transmit[v];
            if (outside(j, net.layers[t][i])) vars[j - 1].given_tx.push_back(v);
        }
    }

    const std::uint64_t p = net.field.p;
    std::vector<std::map<std::vector<int>, mpq_class>> table_both(ell), table_given(ell);
    std::vector<int> x(transmit.size(), 0);
    std::vector<int> y(receive.size(), 0);
    for (std::size_t idx = 0; idx < dist.num_states(); ++idx) {
        if (dist.p[idx] != 0) {
            // receive vector of layer t+1 is hop t applied to the
            // transmit vector of layer t
            std::size_t rx = 0;
            std::size_t tx_base = 0;
            for (int t = 0; t + 1 < r; ++t) {
                const int nin = static_cast<int>(net.layers[t].size());
                const int nout = static_cast<int>(net.layers[t + 1].size());
                for (int i = 0; i < nout; ++i) {
                    std::uint64_t acc = 0;
                    for (int c = 0; c < nin; ++c)
                        acc = (acc + hop_words[t][static_cast<std::size_t>(i) * nin + c] *
                                         static_cast<std::uint64_t>(x[tx_base + c])) %
                              p;
                    y[rx++] = static_cast<int>(acc);
                }
                tx_base += nin;
            }
            for (int j = 0; j < ell; ++j) {
                std::vector<int> key_given, key_both;
                for (int v : vars[j].given_tx) key_given.push_back(x[v]);
                for (int v : vars[j].given_rx) key_given.push_back(y[v]);
                key_both = key_given;
                for (int v : vars[j].target_rx) key_both.push_back(y[v]);
                table_both[j][key_both] += dist.p[idx];
                table_given[j][key_given] += dist.p[idx];
            }
        }
        for (int v = static_cast<int>(x.size()) - 1; v >= 0; --v) {
            if (++x[v] < dist.sizes[v]) break;
            x[v] = 0;
        }
    }

    std::vector<EntropyValue> terms;
    for (int j = 0; j < ell; ++j)
        terms.push_back(difference(entropy_of(table_both[j]), entropy_of(table_given[j])));
    return terms;
}

}  // namespace netbound
