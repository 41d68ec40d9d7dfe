#include <set>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "netbound/andsim.hpp"
#include "netbound/error.hpp"
#include "netbound/exactalg.hpp"
#include "netbound/kkk.hpp"
#include "netbound/rng.hpp"

using namespace netbound;

namespace {

mpq_class q(long num, long den = 1) {
    mpq_class v(num, den);
    v.canonicalize();
    return v;
}

KkkNetwork rational_net(int K, const std::vector<long>& f1, const std::vector<long>& f2) {
    KkkNetwork net;
    net.K = K;
    net.field = FieldSpec::rational();
    net.mode = LayeredNetwork::Mode::Explicit;
    net.F1 = ExactMatrix::zero(net.field, K, K);
    net.F2 = ExactMatrix::zero(net.field, K, K);
    for (int r = 0; r < K; ++r)
        for (int c = 0; c < K; ++c) {
            net.F1.at(r, c) = f1[static_cast<std::size_t>(r * K + c)];
            net.F2.at(r, c) = f2[static_cast<std::size_t>(r * K + c)];
        }
    net.support1 = SupportPattern::of(net.F1);
    net.support2 = SupportPattern::of(net.F2);
    return net;
}

SupportPattern upper_pattern(int K) {
    SupportPattern p = SupportPattern::zero(K, K);
    for (int r = 0; r < K; ++r)
        for (int c = r; c < K; ++c) p.at(r, c) = 1;
    return p;
}

SupportPattern full_pattern(int K) {
    SupportPattern p = SupportPattern::zero(K, K);
    for (auto& b : p.bits) b = 1;
    return p;
}

std::vector<std::vector<long>> random_symbols(Rng& rng, std::size_t rows, std::size_t cols) {
    std::vector<std::vector<long>> c(rows, std::vector<long>(cols, 0));
    for (auto& row : c)
        for (auto& v : row) v = static_cast<long>(rng.below(5));
    return c;
}

// keeps resampling gains on the given supports until the scheme runs;
// pattern-level failures would loop forever, so cap the attempts
EndToEndReport sampled_run(const SupportPattern& s1, const SupportPattern& s2, int N,
                           std::uint64_t seed, const std::vector<std::vector<long>>& symbols,
                           KkkNetwork* out_net = nullptr) {
    for (int attempt = 0; attempt < 50; ++attempt) {
        Rng gains(seed + static_cast<std::uint64_t>(attempt));
        KkkNetwork net;
        net.K = s1.rows;
        net.field = FieldSpec::rational();
        net.mode = LayeredNetwork::Mode::Explicit;
        net.F1 = sample_gains(s1, gains);
        net.F2 = sample_gains(s2, gains);
        net.support1 = s1;
        net.support2 = s2;
        try {
            EndToEndReport rep = end_to_end_check(net, N, symbols);
            if (out_net) *out_net = net;
            return rep;
        } catch (const Error& e) {
            if (e.kind != Error::Kind::NotDiagonalizable &&
                e.kind != Error::Kind::DirectionCollision)
                throw;
        }
    }
    REQUIRE_MESSAGE(false, "no admissible gains after 50 attempts");
    throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("single pair directions are the powers of the one gain") {
    KkkNetwork net = rational_net(1, {0}, {5});
    net.F1.at(0, 0) = q(7, 3);
    net.support1 = SupportPattern::of(net.F1);

    DirectionTable t = build_directions(net, 3);
    REQUIRE(t.edges.size() == 1);
    CHECK(t.edges[0] == std::pair<int, int>(0, 0));
    REQUIRE(t.transmit.size() == 3);
    CHECK(t.transmit[0] == 1);
    CHECK(t.transmit[1] == q(7, 3));
    CHECK(t.transmit[2] == q(49, 9));
    REQUIRE(t.received.size() == 4);
    CHECK(t.received[3] == q(343, 27));
    REQUIRE(t.relay.size() == 4);
    CHECK(t.relay[1] == q(1, 5));
    CHECK(t.relay[3] == q(1, 125));

    EndToEndReport rep = end_to_end_check(net, 3, {{2, 0, 1}});
    CHECK(rep.identity);
    CHECK(rep.coefficient[0] == std::vector<mpq_class>{q(2), q(0), q(1)});
    CHECK(rep.per_stream[0][0][0] == 2);
    CHECK(rep.per_stream[0][1][0] == 0);
    CHECK(rep.per_stream[0][2][0] == 1);
}

TEST_CASE("two fully connected pairs give 16 transmit and 81 relay directions") {
    KkkNetwork net = rational_net(2, {2, 3, 5, 7}, {11, 13, 17, 19});
    DirectionTable t = build_directions(net, 2);

    REQUIRE(t.edges.size() == 4);
    CHECK(t.edges == std::vector<std::pair<int, int>>{{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    CHECK(t.gains == std::vector<mpq_class>{q(2), q(3), q(5), q(7)});
    // inverted second hop: det is -12
    CHECK(t.inverse_gains ==
          std::vector<mpq_class>{q(-19, 12), q(13, 12), q(17, 12), q(-11, 12)});

    CHECK(t.transmit.size() == 16);
    CHECK(t.received.size() == 81);
    CHECK(t.relay.size() == 81);
    CHECK(std::set<mpq_class>(t.transmit.begin(), t.transmit.end()).size() == 16);
    CHECK(std::set<mpq_class>(t.received.begin(), t.received.end()).size() == 81);
    CHECK(std::set<mpq_class>(t.relay.begin(), t.relay.end()).size() == 81);

    // odometer order: the first listed edge is the slowest digit
    CHECK(t.transmit[0] == 1);
    CHECK(t.transmit[1] == 7);
    CHECK(t.transmit[2] == 5);
    CHECK(t.transmit[8] == 2);
    CHECK(t.transmit[15] == 2 * 3 * 5 * 7);

    Rng rng(42);
    auto c = random_symbols(rng, 2, 16);
    EndToEndReport rep = end_to_end_check(net, 2, c);
    CHECK(rep.identity);
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t p = 0; p < 16; ++p) {
            CHECK(rep.coefficient[j][p] == c[j][p]);
            CHECK(rep.per_stream[j][p][1 - j] == 0);
            CHECK(rep.per_stream[j][p][j] == c[j][p]);
        }
}

TEST_CASE("box indexing round-trips and rejects stray exponents") {
    KkkNetwork net = rational_net(2, {2, 3, 5, 7}, {11, 13, 17, 19});
    DirectionTable t = build_directions(net, 2);

    for (std::size_t p = 0; p < t.received.size(); ++p)
        CHECK(t.index_in_box(t.exponents_at(p, 3), 3) == p);

    CHECK(t.index_in_box({1, 0, 1, 0}, 2) == 10);
    CHECK_THROWS_AS(static_cast<void>(t.index_in_box({1, 0, 1}, 2)), Error);
    CHECK_THROWS_AS(static_cast<void>(t.index_in_box({0, 0, 0, 2}, 2)), Error);
    CHECK_THROWS_AS(static_cast<void>(t.index_in_box({0, 0, 0, -1}, 2)), Error);
    CHECK_THROWS_AS(static_cast<void>(t.exponents_at(81, 3)), Error);
    try {
        static_cast<void>(t.index_in_box({0, 0, 0, 2}, 2));
    } catch (const Error& e) {
        CHECK(e.kind == Error::Kind::IndexOutOfBox);
    }
}

TEST_CASE("relay map matches the matrix form on the narrow box") {
    KkkNetwork net = rational_net(2, {2, 3, 5, 7}, {11, 13, 17, 19});
    const int N = 2;
    DirectionTable t = build_directions(net, N);
    Rng rng(7);
    auto c = random_symbols(rng, 2, t.transmit.size());

    // received coefficients assembled by guarded subtraction: an entry
    // contributes only when the lowered exponent stays inside the box
    std::vector<std::vector<mpq_class>> received(
        2, std::vector<mpq_class>(t.relay.size(), mpq_class(0)));
    for (std::size_t pos = 0; pos < t.relay.size(); ++pos) {
        std::vector<int> m = t.exponents_at(pos, N + 1);
        for (std::size_t e = 0; e < t.edges.size(); ++e) {
            const int i = t.edges[e].first;
            const int j = t.edges[e].second;
            std::vector<int> low = m;
            low[e] -= 1;
            bool inside = true;
            for (int d : low)
                if (d < 0 || d >= N) inside = false;
            if (!inside) continue;
            received[static_cast<std::size_t>(j)][pos] +=
                c[static_cast<std::size_t>(i)][t.index_in_box(low, N)];
        }
    }

    std::vector<mpq_class> via_map = relay_map(net, N, received);

    ExactMatrix b = inverse(net.F2);
    std::vector<mpq_class> via_matrix(2, mpq_class(0));
    for (std::size_t p = 0; p < t.transmit.size(); ++p) {
        std::vector<int> m = t.exponents_at(p, N);
        const mpq_class tail = t.relay[t.index_in_box(m, N + 1)];
        for (int j = 0; j < 2; ++j) {
            mpq_class mixed = 0;
            for (int i = 0; i < 2; ++i) mixed += b.at(j, i) * c[static_cast<std::size_t>(i)][p];
            via_matrix[static_cast<std::size_t>(j)] += tail * mixed;
        }
    }
    for (auto& v : via_matrix) v.canonicalize();
    CHECK(via_map == via_matrix);
}

TEST_CASE("relay map passes zero through and picks out single monomials") {
    KkkNetwork net = rational_net(2, {2, 3, 5, 7}, {11, 13, 17, 19});
    DirectionTable t = build_directions(net, 2);
    std::vector<std::vector<mpq_class>> received(
        2, std::vector<mpq_class>(t.relay.size(), mpq_class(0)));

    std::vector<mpq_class> out = relay_map(net, 2, received);
    CHECK(out == std::vector<mpq_class>{q(0), q(0)});

    received[1][40] = 1;
    out = relay_map(net, 2, received);
    CHECK(out[0] == 0);
    CHECK(out[1] == t.relay[40]);

    received.pop_back();
    CHECK_THROWS_AS(static_cast<void>(relay_map(net, 2, received)), Error);
    received.push_back(std::vector<mpq_class>(3, mpq_class(0)));
    CHECK_THROWS_AS(static_cast<void>(relay_map(net, 2, received)), Error);
}

TEST_CASE("exponent bumps never escape the wider box") {
    KkkNetwork net = rational_net(2, {2, 3, 5, 7}, {11, 13, 17, 19});
    const int N = 2;
    DirectionTable t = build_directions(net, N);
    Rng rng(11);
    auto c = random_symbols(rng, 2, t.transmit.size());

    // bump route: raise one exponent per incident edge
    std::vector<std::vector<mpq_class>> bumped(
        2, std::vector<mpq_class>(t.relay.size(), mpq_class(0)));
    for (std::size_t e = 0; e < t.edges.size(); ++e)
        for (std::size_t p = 0; p < t.transmit.size(); ++p) {
            std::vector<int> m = t.exponents_at(p, N);
            m[e] += 1;
            bumped[static_cast<std::size_t>(t.edges[e].second)][t.index_in_box(m, N + 1)] +=
                c[static_cast<std::size_t>(t.edges[e].first)][p];
        }

    // subtraction route with explicit boundary guards, every box entry
    std::size_t guarded_out = 0;
    std::vector<std::vector<mpq_class>> lowered(
        2, std::vector<mpq_class>(t.relay.size(), mpq_class(0)));
    for (std::size_t pos = 0; pos < t.relay.size(); ++pos) {
        std::vector<int> m = t.exponents_at(pos, N + 1);
        for (std::size_t e = 0; e < t.edges.size(); ++e) {
            std::vector<int> low = m;
            low[e] -= 1;
            bool inside = true;
            for (int d : low)
                if (d < 0 || d >= N) inside = false;
            if (!inside) {
                ++guarded_out;
                continue;
            }
            lowered[static_cast<std::size_t>(t.edges[e].second)][pos] +=
                c[static_cast<std::size_t>(t.edges[e].first)][t.index_in_box(low, N)];
        }
    }
    CHECK(bumped == lowered);
    CHECK(guarded_out > 0);

    // the all-top corner can only be reached by lowering one exponent
    // below the top, so with four edges nothing lands there
    CHECK(bumped[0].back() == 0);
    CHECK(bumped[1].back() == 0);
}

TEST_CASE("direction counts shrink by the expected ratio and recover with larger boxes") {
    KkkNetwork net = rational_net(2, {2, 3, 5, 7}, {11, 13, 17, 19});
    CHECK(build_directions(net, 2).transmit.size() == 16);
    CHECK(build_directions(net, 3).transmit.size() == 81);
    CHECK(build_directions(net, 3).relay.size() == 256);

    double prev = 0.0;
    for (int N = 2; N <= 8; ++N) {
        const double ratio =
            std::pow(static_cast<double>(N) / static_cast<double>(N + 1), 4.0);
        CHECK(ratio > prev);
        CHECK(1.0 - ratio <= 4.0 / static_cast<double>(N));
        prev = ratio;
    }
}

TEST_CASE("triangular three pair network runs the full scheme") {
    SupportPattern u3 = upper_pattern(3);
    REQUIRE(check_diagonalizable(u3, u3).ok);

    Rng rng(500);
    auto c = random_symbols(rng, 3, 64);
    KkkNetwork net;
    EndToEndReport rep = sampled_run(u3, u3, 2, 501, c, &net);
    CHECK(rep.directions.edges.size() == 6);
    CHECK(rep.directions.transmit.size() == 64);
    CHECK(rep.directions.relay.size() == 729);
    CHECK(rep.identity);
    CHECK(rep.coefficient == std::vector<std::vector<mpq_class>>{
                                 {c[0].begin(), c[0].end()},
                                 {c[1].begin(), c[1].end()},
                                 {c[2].begin(), c[2].end()}});
    CHECK(SupportPattern::of(inverse(net.F2)) == u3);
}

TEST_CASE("sampled networks of every admissible shape recover their symbols") {
    struct Family {
        SupportPattern s;
    };
    std::vector<Family> families = {{SupportPattern::identity(1)}, {SupportPattern::identity(2)},
                                    {SupportPattern::identity(3)}, {upper_pattern(2)},
                                    {upper_pattern(3)},            {full_pattern(2)},
                                    {full_pattern(3)}};
    for (int trial = 0; trial < 50; ++trial) {
        const SupportPattern& s = families[static_cast<std::size_t>(trial) % families.size()].s;
        const std::size_t edges = static_cast<std::size_t>(
            std::count(s.bits.begin(), s.bits.end(), std::uint8_t{1}));
        std::size_t narrow = 1;
        for (std::size_t e = 0; e < edges; ++e) narrow *= 2;

        Rng rng(9000 + static_cast<std::uint64_t>(trial));
        auto c = random_symbols(rng, static_cast<std::size_t>(s.rows), narrow);
        EndToEndReport rep =
            sampled_run(s, s, 2, 7000 + static_cast<std::uint64_t>(trial) * 53, c);
        REQUIRE(rep.identity);
        for (std::size_t j = 0; j < static_cast<std::size_t>(s.rows); ++j)
            for (std::size_t p = 0; p < narrow; ++p) {
                REQUIRE(rep.coefficient[j][p] == c[j][p]);
                for (std::size_t i = 0; i < static_cast<std::size_t>(s.rows); ++i)
                    if (i != j) REQUIRE(rep.per_stream[j][p][i] == 0);
            }
    }
}

TEST_CASE("hop supports that do not invert onto each other are refused") {
    SupportPattern t3 = SupportPattern::zero(3, 3);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            if (std::abs(r - c) <= 1) t3.at(r, c) = 1;

    Rng rng(3);
    KkkNetwork net;
    net.K = 3;
    net.field = FieldSpec::rational();
    net.mode = LayeredNetwork::Mode::Explicit;
    net.F1 = sample_gains(t3, rng);
    net.F2 = sample_gains(t3, rng);
    net.support1 = t3;
    net.support2 = t3;
    CHECK_THROWS_AS(static_cast<void>(build_directions(net, 2)), Error);
    try {
        static_cast<void>(build_directions(net, 2));
    } catch (const Error& e) {
        CHECK(e.kind == Error::Kind::NotDiagonalizable);
    }
}

TEST_CASE("gains whose inverse vanishes on a support edge are refused") {
    // the second hop is triangular with an inverse that is exactly zero
    // in its upper right corner, which the first hop's support needs
    KkkNetwork net = rational_net(3, {1, 2, 3, 0, 4, 5, 0, 0, 6},
                                  {1, 1, 1, 0, 1, 1, 0, 0, 1});
    REQUIRE(inverse(net.F2).at(0, 2) == 0);
    try {
        static_cast<void>(build_directions(net, 2));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind == Error::Kind::NotDiagonalizable);
    }
}

TEST_CASE("zero gains on support edges and stray gains off them are caught") {
    KkkNetwork net = rational_net(2, {2, 3, 5, 7}, {11, 13, 17, 19});
    net.F1.at(0, 1) = 0;
    try {
        static_cast<void>(build_directions(net, 2));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind == Error::Kind::ZeroGainOnSupport);
    }

    net = rational_net(2, {2, 0, 0, 7}, {11, 0, 0, 19});
    net.F1.at(0, 1) = 4;
    try {
        static_cast<void>(build_directions(net, 2));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind == Error::Kind::InvalidInput);
    }
}

TEST_CASE("colliding direction values are refused on either side") {
    // gain 1 collapses every source monomial onto the same value
    KkkNetwork net = rational_net(1, {1}, {5});
    try {
        static_cast<void>(build_directions(net, 2));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind == Error::Kind::DirectionCollision);
        CHECK(std::string(e.what()).find("source") != std::string::npos);
    }

    // distinct source powers of 7, but the inverted second hop is 1
    net = rational_net(1, {7}, {1});
    try {
        static_cast<void>(build_directions(net, 2));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind == Error::Kind::DirectionCollision);
        CHECK(std::string(e.what()).find("relay") != std::string::npos);
    }
}

TEST_CASE("field, mode, box bound and size guards") {
    KkkNetwork net = rational_net(2, {2, 3, 5, 7}, {11, 13, 17, 19});

    KkkNetwork gf = net;
    gf.field = FieldSpec::prime(2);
    CHECK_THROWS_AS(static_cast<void>(build_directions(gf, 2)), Error);

    KkkNetwork gen = net;
    gen.mode = LayeredNetwork::Mode::Generic;
    CHECK_THROWS_AS(static_cast<void>(build_directions(gen, 2)), Error);

    CHECK_THROWS_AS(static_cast<void>(build_directions(net, 0)), Error);
    CHECK_THROWS_AS(static_cast<void>(build_directions(net, 9)), Error);

    KkkNetwork big = rational_net(3, {2, 3, 5, 7, 11, 13, 17, 19, 23},
                                  {1, 1, 1, 1, 2, 4, 1, 3, 9});
    try {
        static_cast<void>(build_directions(big, 4));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind == Error::Kind::TooLarge);
    }

    CHECK_THROWS_AS(static_cast<void>(end_to_end_check(net, 2, {{1, 2}})), Error);
}

TEST_CASE("sampled gains are reproducible and stay in range") {
    SupportPattern p = full_pattern(2);
    Rng a(123), b(123);
    ExactMatrix ma = sample_gains(p, a);
    ExactMatrix mb = sample_gains(p, b);
    CHECK(ma == mb);
    for (const mpq_class& g : ma.e) {
        CHECK(g > 0);
        CHECK(g <= 997);
        CHECK(g >= q(1, 997));
    }

    SupportPattern sparse = SupportPattern::identity(3);
    Rng c(9);
    ExactMatrix mc = sample_gains(sparse, c);
    CHECK(SupportPattern::of(mc) == sparse);
}

TEST_CASE("alignment reports serialize with direction values and coefficients") {
    KkkNetwork net = rational_net(1, {1}, {5});
    net.F1.at(0, 0) = q(7, 3);
    net.support1 = SupportPattern::of(net.F1);
    EndToEndReport rep = end_to_end_check(net, 3, {{2, 0, 1}});
    const std::string text = and_report_to_json_text(rep);
    const auto j = nlohmann::json::parse(text);
    CHECK(j["pairs"] == 1);
    CHECK(j["n"] == 3);
    CHECK(j["edges"] == nlohmann::json::array({nlohmann::json::array({"s1", "u1"})}));
    CHECK(j["transmit_directions"] == 3);
    CHECK(j["relay_directions"] == 4);
    CHECK(j["directions"][1]["m"] == nlohmann::json::array({1}));
    CHECK(j["directions"][1]["value"] == "7/3");
    CHECK(j["directions"][2]["value"] == "49/9");
    CHECK(j["identity"] == true);
    CHECK(j["destinations"][0]["name"] == "d1");
    CHECK(j["destinations"][0]["coefficients"] ==
          nlohmann::json::array({"2", "0", "1"}));
    CHECK(text.back() == '\n');
    CHECK(and_report_to_json_text(rep) == text);
}
