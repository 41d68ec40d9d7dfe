#include "netbound/bounds.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "netbound/entropy.hpp"
#include "netbound/error.hpp"
#include "netbound/oracle.hpp"
#include "netbound/rng.hpp"

using namespace netbound;

namespace {

// random explicit GF(2) network with the given layer widths
LayeredNetwork random_net(std::uint64_t seed, const std::vector<int>& widths) {
    Rng rng(seed);
    LayeredNetwork net;
    net.field = FieldSpec::prime(2);
    net.K = widths.front();
    for (std::size_t t = 0; t < widths.size(); ++t) {
        std::vector<std::string> layer;
        for (int i = 1; i <= widths[t]; ++i) {
            if (t == 0)
                layer.push_back("s" + std::to_string(i));
            else if (t + 1 == widths.size())
                layer.push_back("d" + std::to_string(i));
            else
                layer.push_back("u" + std::to_string(t) + "_" + std::to_string(i));
        }
        net.layers.push_back(layer);
    }
    for (std::size_t t = 0; t + 1 < widths.size(); ++t) {
        ExactMatrix h = ExactMatrix::zero(net.field, widths[t + 1], widths[t]);
        for (int r = 0; r < h.rows; ++r)
            for (int c = 0; c < h.cols; ++c) h.at(r, c) = static_cast<long>(rng.below(2));
        net.hops.push_back(h);
        net.supports.push_back(SupportPattern::of(h));
    }
    net.validate();
    return net;
}

// same walk, but connectivity only
LayeredNetwork random_generic_net(std::uint64_t seed, const std::vector<int>& widths) {
    LayeredNetwork net = random_net(seed, widths);
    net.mode = LayeredNetwork::Mode::Generic;
    return net;
}

// independent minimum over single cuts: sources in, destinations out,
// every middle subset tried
int classic_by_enumeration(const LayeredNetwork& net) {
    const int r = net.num_layers();
    std::vector<std::pair<int, int>> mid;
    for (int t = 1; t + 1 < r; ++t)
        for (int i = 0; i < static_cast<int>(net.layers[t].size()); ++i) mid.emplace_back(t, i);
    REQUIRE(mid.size() <= 20);

    int best = INT_MAX;
    for (std::uint32_t m = 0; m < (1u << mid.size()); ++m) {
        std::vector<std::vector<int>> in(r);
        for (int i = 0; i < static_cast<int>(net.layers[0].size()); ++i) in[0].push_back(i);
        for (std::size_t b = 0; b < mid.size(); ++b)
            if (m >> b & 1) in[mid[b].first].push_back(mid[b].second);
        int cost = 0;
        for (int t = 0; t + 1 < r; ++t) {
            std::vector<int> rows;
            for (int i = 0; i < static_cast<int>(net.layers[t + 1].size()); ++i)
                if (std::find(in[t + 1].begin(), in[t + 1].end(), i) == in[t + 1].end())
                    rows.push_back(i);
            if (net.mode == LayeredNetwork::Mode::Generic)
                cost += generic_rank(sub_pattern(net.supports[t], rows, in[t]));
            else
                cost += rank(submatrix(net.hops[t], rows, in[t]));
        }
        best = std::min(best, cost);
    }
    return best;
}

const CutPair& cut_of(const BoundReport& rep) { return std::get<CutPair>(rep.witness); }

}  // namespace

TEST_CASE("single cut on the z network counts both crossing signals") {
    const LayeredNetwork z = fixtures::z_channel();
    const BoundReport rep = classic_cutset(z);
    CHECK(rep.value == 2);
    CHECK(!rep.dof);
    CHECK(cut_of(rep).omega == std::vector<std::string>{"s1", "s2"});
    CHECK(cut_of(rep).theta.empty());
    REQUIRE(rep.terms.size() == 1);
    CHECK(rep.terms[0].rank_omega == 2);
    CHECK(rep.terms[0].value() == 2);
    CHECK(rep.stats.candidates == 1);
}

TEST_CASE("two-level evaluation reproduces the hand-computed breakdown") {
    const LayeredNetwork z = fixtures::z_channel();

    // d2 joins the outer set, s2 the inner one: the d1 row of the outer
    // rank loses nothing new, and the cross term cancels one unit
    const BoundReport rep = eval_pair_bound(z, {{"s1", "s2", "d2"}, {"s2"}});
    CHECK(rep.value == 1);
    REQUIRE(rep.terms.size() == 1);
    CHECK(rep.terms[0].layer == 0);
    CHECK(rep.terms[0].rank_omega == 1);
    CHECK(rep.terms[0].rank_theta == 1);
    CHECK(rep.terms[0].rank_cross == 1);

    // all four destination subsets, inner sources forced to match
    CHECK(eval_pair_bound(z, {{"s1", "s2"}, {}}).value == 2);
    CHECK(eval_pair_bound(z, {{"s1", "s2", "d1"}, {"s1"}}).value == 2);
    CHECK(eval_pair_bound(z, {{"s1", "s2", "d1", "d2"}, {"s1", "s2"}}).value == 2);
}

TEST_CASE("bad cut offers are rejected with the reason") {
    const LayeredNetwork z = fixtures::z_channel();
    CHECK_THROWS_AS(eval_pair_bound(z, {{"s1"}, {}}), Error);          // s2 missing
    CHECK_THROWS_AS(eval_pair_bound(z, {{"s1", "s2"}, {"s1"}}), Error);  // d1 not inside
    CHECK_THROWS_AS(eval_pair_bound(z, {{"s1", "s2", "nope"}, {}}), Error);
    try {
        eval_pair_bound(z, {{"s1", "s2", "d1"}, {}});
        FAIL("coupling violation accepted");
    } catch (const Error& e) {
        CHECK(e.kind == Error::Kind::InvalidCut);
    }
}

TEST_CASE("cut search finds the tighter two-level value on the z network") {
    const LayeredNetwork z = fixtures::z_channel();
    const BoundReport rep = search_pair_bound(z);
    CHECK(rep.value == 1);
    CHECK(cut_of(rep).omega == std::vector<std::string>{"s1", "s2", "d2"});
    CHECK(cut_of(rep).theta == std::vector<std::string>{"s2"});
    REQUIRE(rep.terms.size() == 1);
    CHECK(rep.terms[0].rank_omega == 1);
    CHECK(rep.terms[0].rank_theta == 1);
    CHECK(rep.terms[0].rank_cross == 1);
    CHECK(rep.stats.candidates == 4);
    CHECK(rep.stats.states_explored > 0);

    // the witness certifies itself
    CHECK(eval_pair_bound(z, cut_of(rep)).value == rep.value);
}

TEST_CASE("identity pipes cost one unit per pair and prefer the plain cut") {
    for (int K = 1; K <= 4; ++K) {
        const LayeredNetwork net = fixtures::pipes(K);
        CHECK(classic_cutset(net).value == K);
        const BoundReport rep = search_pair_bound(net);
        CHECK(rep.value == K);
        CHECK(cut_of(rep).omega == net.layers[0]);
        CHECK(cut_of(rep).theta.empty());
    }
}

TEST_CASE("an empty inner set reduces to the single-cut form") {
    const LayeredNetwork z = fixtures::z_channel();
    CHECK(eval_pair_bound(z, {{"s1", "s2"}, {}}).value == classic_cutset(z).value);
    const LayeredNetwork p3 = fixtures::pipes(3);
    CHECK(eval_pair_bound(p3, {{"s1", "s2", "s3"}, {}}).value == classic_cutset(p3).value);
}

TEST_CASE("relay row that inverts the first hop keeps both pairs") {
    // F2 undoes F1, so capacity is 2 and neither search can go below it
    const KkkNetwork relay =
        fixtures::kkk(FieldSpec::prime(2), 2, {1, 1, 0, 1}, {1, 1, 0, 1});
    const LayeredNetwork net = relay.to_layered();
    CHECK(classic_cutset(net).value == 2);
    CHECK(search_pair_bound(net).value == 2);
}

TEST_CASE("search is never beaten by an offered cut nor by the single-cut form") {
    const LayeredNetwork z = fixtures::z_channel();
    const int best = search_pair_bound(z).value;
    CHECK(best <= classic_cutset(z).value);
    CHECK(best <= eval_pair_bound(z, {{"s1", "s2"}, {}}).value);
    CHECK(best <= eval_pair_bound(z, {{"s1", "s2", "d1"}, {"s1"}}).value);
    CHECK(best <= eval_pair_bound(z, {{"s1", "s2", "d1", "d2"}, {"s1", "s2"}}).value);

    const KkkNetwork relay =
        fixtures::kkk(FieldSpec::prime(2), 2, {1, 0, 1, 1}, {1, 1, 0, 1});
    const LayeredNetwork net = relay.to_layered();
    CHECK(search_pair_bound(net).value <= classic_cutset(net).value);
}

TEST_CASE("all-zero hops drive the bound to zero with the plainest witness") {
    LayeredNetwork net = fixtures::pipes(2);
    net.hops[0] = ExactMatrix::zero(net.field, 2, 2);
    net.supports[0] = SupportPattern::of(net.hops[0]);
    const BoundReport rep = search_pair_bound(net);
    CHECK(rep.value == 0);
    CHECK(cut_of(rep).omega == std::vector<std::string>{"s1", "s2"});
    CHECK(cut_of(rep).theta.empty());
}

TEST_CASE("layer walk agrees with direct enumeration of every cut pair") {
    const std::vector<std::pair<int, std::vector<int>>> shapes = {
        {100, {2, 2, 2}}, {20, {2, 3, 2}}, {20, {3, 2, 3}}, {10, {2, 1, 2, 2}}, {10, {2, 2, 2, 2}}};
    std::uint64_t seed = 1;
    for (const auto& [count, widths] : shapes) {
        for (int i = 0; i < count; ++i, ++seed) {
            const LayeredNetwork net = random_net(seed, widths);
            const BoundReport fast = search_pair_bound(net);
            const BoundReport slow = exhaustive_pair_search(net);
            CHECK(fast.value == slow.value);
            CHECK(cut_of(fast).omega == cut_of(slow).omega);
            CHECK(cut_of(fast).theta == cut_of(slow).theta);
            CHECK(eval_pair_bound(net, cut_of(fast)).value == fast.value);
        }
    }
}

TEST_CASE("connectivity-only networks walk the same search") {
    for (std::uint64_t seed = 900; seed < 920; ++seed) {
        const LayeredNetwork net = random_generic_net(seed, {2, 2, 2});
        const BoundReport fast = search_pair_bound(net);
        const BoundReport slow = exhaustive_pair_search(net);
        CHECK(fast.dof);
        CHECK(fast.value == slow.value);
        CHECK(cut_of(fast).omega == cut_of(slow).omega);
        CHECK(fast.value <= classic_cutset(net).value);
    }
}

TEST_CASE("single-cut walk agrees with direct enumeration") {
    std::uint64_t seed = 500;
    for (int i = 0; i < 30; ++i, ++seed) {
        const LayeredNetwork net = random_net(seed, {2, 3, 2});
        CHECK(classic_cutset(net).value == classic_by_enumeration(net));
    }
    for (int i = 0; i < 20; ++i, ++seed) {
        const LayeredNetwork net = random_net(seed, {2, 1, 2, 2});
        CHECK(classic_cutset(net).value == classic_by_enumeration(net));
    }
}

TEST_CASE("reports serialize with a fixed key order and repeatable bytes") {
    const LayeredNetwork z = fixtures::z_channel();
    const std::string text = report_to_json_text(search_pair_bound(z));
    CHECK(text == report_to_json_text(search_pair_bound(z)));

    const auto j = nlohmann::json::parse(text);
    CHECK(j["bound"] == 1);
    CHECK(j["units"] == "log|F|");
    CHECK(j["witness"]["omega"] == nlohmann::json({"s1", "s2", "d2"}));
    CHECK(j["witness"]["theta"] == nlohmann::json({"s2"}));
    REQUIRE(j["terms"].size() == 1);
    CHECK(j["terms"][0]["rank_omega"] == 1);
    CHECK(j["terms"][0]["rank_theta"] == 1);
    CHECK(j["terms"][0]["rank_cross"] == 1);
    CHECK(j["terms"][0]["value"] == 1);
    CHECK(j["stats"]["candidates"] == 4);
    CHECK(text.back() == '\n');

    LayeredNetwork g = z;
    g.mode = LayeredNetwork::Mode::Generic;
    const auto jg = nlohmann::json::parse(report_to_json_text(search_pair_bound(g)));
    CHECK(jg["units"] == "dof");
    CHECK(jg["bound"] == 1);
}

TEST_CASE("witness drawing is a well-formed graph file") {
    const LayeredNetwork z = fixtures::z_channel();
    const std::string dot = cut_to_dot(z, {{"s1", "s2", "d2"}, {"s2"}});
    CHECK(dot.rfind("digraph", 0) == 0);
    CHECK(dot.find("rankdir=LR") != std::string::npos);
    CHECK(dot.find("\"s1\"") != std::string::npos);
    CHECK(dot.find("gold") != std::string::npos);       // inner set
    CHECK(dot.find("lightblue") != std::string::npos);  // outer only
    CHECK(dot.find("lightgray") != std::string::npos);  // outside
    CHECK(dot.find("dashed") != std::string::npos);     // crossing edge
    CHECK(std::count(dot.begin(), dot.end(), '{') == std::count(dot.begin(), dot.end(), '}'));
}

TEST_CASE("limit strings parse and bad ones are refused") {
    const Limits d = Limits::from_env(nullptr);
    CHECK(d.max_layer_width == 12);
    CHECK(d.max_transitions == 50000000);
    CHECK(Limits::from_env("").max_layer_width == 12);

    const Limits one = Limits::from_env("width=14");
    CHECK(one.max_layer_width == 14);
    CHECK(one.max_transitions == 50000000);

    const Limits both = Limits::from_env("width=14,states=100000000");
    CHECK(both.max_layer_width == 14);
    CHECK(both.max_transitions == 100000000);

    CHECK(Limits::from_env("states=1000").max_layer_width == 12);

    for (const char* bad : {"width", "width=abc", "flavor=3", "width=0", "width=21"}) {
        try {
            Limits::from_env(bad);
            FAIL("accepted a bad limit string");
        } catch (const Error& e) {
            CHECK(e.kind == Error::Kind::InvalidInput);
        }
    }
}

TEST_CASE("oversized problems are refused before any work starts") {
    const LayeredNetwork z = fixtures::z_channel();

    Limits narrow;
    narrow.max_layer_width = 1;
    try {
        search_pair_bound(z, narrow);
        FAIL("width cap ignored");
    } catch (const Error& e) {
        CHECK(e.kind == Error::Kind::TooLarge);
        CHECK(std::string(e.what()).find("NETBOUND_LIMITS") != std::string::npos);
    }
    CHECK_THROWS_AS(classic_cutset(z, narrow), Error);

    Limits tiny;
    tiny.max_transitions = 1;
    try {
        search_pair_bound(z, tiny);
        FAIL("work cap ignored");
    } catch (const Error& e) {
        CHECK(e.kind == Error::Kind::TooLarge);
    }
}

TEST_CASE("entropy terms never exceed their rank budget") {
    const LayeredNetwork z = fixtures::z_channel();
    const CutChain tight{{{"s1", "s2", "d2"}, {"s2"}}};
    const CutChain loose{{{"s1", "s2", "d1", "d2"}, {"s1", "s2"}}};
    const BoundReport tight_rep = eval_pair_bound(z, {{"s1", "s2", "d2"}, {"s2"}});
    const BoundReport loose_rep = eval_pair_bound(z, {{"s1", "s2", "d1", "d2"}, {"s1", "s2"}});

    const long double eps = 1e-9L;
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<mpq_class> w;
        for (int i = 0; i < 4; ++i) w.emplace_back(static_cast<long>(1 + rng.below(16)));
        const auto dist = TinyJointDistribution::from_weights({"s1", "s2"}, {2, 2}, w);

        for (const auto& [chain, rep] : {std::pair{tight, tight_rep}, {loose, loose_rep}}) {
            const auto terms = entropy_bound_terms(z, chain, dist);
            REQUIRE(terms.size() == 2);
            int ro = 0, rt = 0, rc = 0;
            for (const auto& t : rep.terms) {
                ro += t.rank_omega;
                rt += t.rank_theta;
                rc += t.rank_cross;
            }
            CHECK(terms[0].approx <= ro + eps);
            CHECK(terms[1].approx <= rt - rc + eps);
            CHECK(terms[0].approx + terms[1].approx <= rep.value + eps);
        }
    }
}
