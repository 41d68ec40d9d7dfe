#pragma once

#include <string>
#include <vector>

#include "netbound/netmodel.hpp"

namespace fixtures {

inline netbound::ExactMatrix mat(const netbound::FieldSpec& f, int rows, int cols,
                                 std::vector<long> vals) {
    netbound::ExactMatrix m = netbound::ExactMatrix::zero(f, rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            m.at(r, c) = netbound::field_reduce(
                f, mpq_class(vals[static_cast<std::size_t>(r) * cols + c]));
    return m;
}

inline netbound::SupportPattern pat(int rows, int cols, std::vector<int> vals) {
    netbound::SupportPattern p = netbound::SupportPattern::zero(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            p.at(r, c) = vals[static_cast<std::size_t>(r) * cols + c] ? 1 : 0;
    return p;
}

// two senders, two receivers: d1 hears both sources, d2 hears only s2
inline netbound::LayeredNetwork z_channel() {
    netbound::LayeredNetwork net;
    net.field = netbound::FieldSpec::prime(2);
    net.K = 2;
    net.layers = {{"s1", "s2"}, {"d1", "d2"}};
    net.hops = {mat(net.field, 2, 2, {1, 1, 0, 1})};
    net.supports = {netbound::SupportPattern::of(net.hops[0])};
    net.validate();
    return net;
}

// K disjoint source-to-destination lines
inline netbound::LayeredNetwork pipes(int K) {
    netbound::LayeredNetwork net;
    net.field = netbound::FieldSpec::prime(2);
    net.K = K;
    std::vector<std::string> s, d;
    for (int i = 1; i <= K; ++i) {
        s.push_back("s" + std::to_string(i));
        d.push_back("d" + std::to_string(i));
    }
    net.layers = {s, d};
    net.hops = {netbound::ExactMatrix::identity(net.field, K)};
    net.supports = {netbound::SupportPattern::of(net.hops[0])};
    net.validate();
    return net;
}

inline netbound::KkkNetwork kkk(const netbound::FieldSpec& f, int K, std::vector<long> f1,
                                std::vector<long> f2) {
    netbound::KkkNetwork net;
    net.K = K;
    net.field = f;
    net.F1 = mat(f, K, K, std::move(f1));
    net.F2 = mat(f, K, K, std::move(f2));
    net.support1 = netbound::SupportPattern::of(net.F1);
    net.support2 = netbound::SupportPattern::of(net.F2);
    return net;
}

// two flows forced through the single middle edge, plus a direct branch
// from s1 to d2 so neither hop-local edge alone separates everything
inline netbound::WirelineNetwork bottleneck() {
    netbound::WirelineNetwork net;
    net.nodes = {"s1", "s2", "a", "b", "d1", "d2"};
    net.edges = {{"s1", "a"}, {"s2", "a"}, {"a", "b"}, {"b", "d1"}, {"b", "d2"}, {"s1", "d2"}};
    net.pairs = {{"s1", "d1"}, {"s2", "d2"}};
    net.validate();
    return net;
}

}  // namespace fixtures
