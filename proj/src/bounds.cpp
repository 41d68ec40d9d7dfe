#include "netbound/bounds.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "netbound/error.hpp"

namespace netbound {

namespace {

using Mask = std::uint32_t;
using nlohmann::ordered_json;

int sub_rank(const LayeredNetwork& net, int hop, const std::vector<int>& rows,
             const std::vector<int>& cols) {
    if (net.mode == LayeredNetwork::Mode::Generic)
        return generic_rank(sub_pattern(net.supports[hop], rows, cols));
    return rank(submatrix(net.hops[hop], rows, cols));
}

// memoized rank of a hop restricted to a transmit mask and receive mask
struct RankCache {
    const LayeredNetwork* net;
    std::vector<std::unordered_map<std::uint32_t, int>> memo;

    explicit RankCache(const LayeredNetwork& n) : net(&n), memo(n.hops.size()) {}

    int get(int hop, Mask cols, Mask rows) {
        if (cols == 0 || rows == 0) return 0;
        const std::uint32_t key = (cols << 12) | rows;
        auto it = memo[hop].find(key);
        if (it != memo[hop].end()) return it->second;
        std::vector<int> ri, ci;
        for (int c = 0; c < net->hops[hop].cols; ++c)
            if (cols >> c & 1) ci.push_back(c);
        for (int r = 0; r < net->hops[hop].rows; ++r)
            if (rows >> r & 1) ri.push_back(r);
        const int rk = sub_rank(*net, hop, ri, ci);
        memo[hop].emplace(key, rk);
        return rk;
    }
};

// hop term of the two-level value for consecutive layer states
int hop_cost(RankCache& cache, int hop, Mask full_next, std::pair<Mask, Mask> cur,
             std::pair<Mask, Mask> next) {
    const Mask rows_om = ~next.first & full_next;
    const Mask rows_th = ~next.second & full_next;
    return cache.get(hop, cur.first, rows_om) + cache.get(hop, cur.second, rows_th) -
           cache.get(hop, cur.second, rows_om);
}

// per-layer digit string packed into an integer, first node most
// significant: 2 inside theta, 1 inside omega only, 0 outside
std::uint64_t layer_key(std::pair<Mask, Mask> state, int width) {
    std::uint64_t key = 0;
    for (int i = 0; i < width; ++i) {
        const int digit = (state.second >> i & 1) ? 2 : (state.first >> i & 1) ? 1 : 0;
        key = key * 3 + static_cast<std::uint64_t>(digit);
    }
    return key;
}

// every (omega, theta-inside-omega) pair over a layer of the given width
std::vector<std::pair<Mask, Mask>> pair_states(int width) {
    std::vector<std::pair<Mask, Mask>> v;
    const Mask full = (1u << width) - 1;
    for (Mask om = 0;; ++om) {
        Mask th = om;
        for (;;) {
            v.emplace_back(om, th);
            if (th == 0) break;
            th = (th - 1) & om;
        }
        if (om == full) break;
    }
    return v;
}

void check_widths(const LayeredNetwork& net, const Limits& lim) {
    for (const auto& layer : net.layers)
        if (static_cast<int>(layer.size()) > lim.max_layer_width)
            throw too_large("layer width " + std::to_string(layer.size()) +
                            " exceeds the limit of " + std::to_string(lim.max_layer_width) +
                            "; raise NETBOUND_LIMITS or evaluate a handpicked cut");
}

std::vector<std::string> mask_nodes(const LayeredNetwork& net, const std::vector<Mask>& masks) {
    std::vector<std::string> nodes;
    for (int t = 0; t < net.num_layers(); ++t)
        for (int i = 0; i < static_cast<int>(net.layers[t].size()); ++i)
            if (masks[t] >> i & 1) nodes.push_back(net.layers[t][i]);
    return nodes;
}

struct DpOutcome {
    long long value = 0;
    std::vector<std::uint64_t> encoding;
    std::vector<Mask> omega, theta;
};

// backward sweep plus greedy lexicographic reconstruction for one fixed
// boundary; layer state lists must already include the fixed first and
// last entries
DpOutcome run_layer_dp(const LayeredNetwork& net, RankCache& cache,
                       const std::vector<std::vector<std::pair<Mask, Mask>>>& states,
                       SearchStats& stats) {
    const int r = net.num_layers();
    std::vector<std::vector<long long>> h(r);
    h[r - 1].assign(states[r - 1].size(), 0);
    for (int t = r - 2; t >= 0; --t) {
        const Mask full_next = (1u << net.layers[t + 1].size()) - 1;
        h[t].assign(states[t].size(), 0);
        for (std::size_t i = 0; i < states[t].size(); ++i) {
            long long best = -1;
            for (std::size_t j = 0; j < states[t + 1].size(); ++j) {
                const long long v =
                    hop_cost(cache, t, full_next, states[t][i], states[t + 1][j]) + h[t + 1][j];
                if (best < 0 || v < best) best = v;
            }
            h[t][i] = best;
        }
        stats.states_explored += states[t].size();
    }
    stats.states_explored += states[r - 1].size();

    DpOutcome out;
    out.value = h[0][0];
    std::size_t cur = 0;
    out.encoding.push_back(layer_key(states[0][0], static_cast<int>(net.layers[0].size())));
    out.omega.push_back(states[0][0].first);
    out.theta.push_back(states[0][0].second);
    for (int t = 0; t + 1 < r; ++t) {
        const int width_next = static_cast<int>(net.layers[t + 1].size());
        const Mask full_next = (1u << width_next) - 1;
        std::size_t pick = states[t + 1].size();
        std::uint64_t pick_key = 0;
        for (std::size_t j = 0; j < states[t + 1].size(); ++j) {
            const long long v =
                hop_cost(cache, t, full_next, states[t][cur], states[t + 1][j]) + h[t + 1][j];
            if (v != h[t][cur]) continue;
            const std::uint64_t key = layer_key(states[t + 1][j], width_next);
            if (pick == states[t + 1].size() || key < pick_key) {
                pick = j;
                pick_key = key;
            }
        }
        cur = pick;
        out.encoding.push_back(pick_key);
        out.omega.push_back(states[t + 1][cur].first);
        out.theta.push_back(states[t + 1][cur].second);
    }
    return out;
}

}  // namespace

Limits Limits::from_env(const char* text) {
    Limits lim;
    if (text == nullptr || *text == '\0') return lim;
    std::string s(text);
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        const std::string item = s.substr(pos, comma - pos);
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw Error(Error::Kind::InvalidInput, "limit entries look like key=value: " + item);
        const std::string key = item.substr(0, eq);
        const std::string val = item.substr(eq + 1);
        try {
            if (key == "width")
                lim.max_layer_width = std::stoi(val);
            else if (key == "states")
                lim.max_transitions = std::stoull(val);
            else
                throw Error(Error::Kind::InvalidInput, "unknown limit key " + key);
        } catch (const std::logic_error&) {
            throw Error(Error::Kind::InvalidInput, "bad limit value " + val);
        }
        pos = comma + 1;
    }
    if (lim.max_layer_width < 1 || lim.max_layer_width > 20)
        throw Error(Error::Kind::InvalidInput, "width limit must be between 1 and 20");
    return lim;
}

BoundReport eval_pair_bound(const LayeredNetwork& net, const CutPair& c) {
    net.validate();
    CutCheck chk = validate_cut_pair(net, c);
    if (!chk.ok) {
        std::string msg = "cut pair rejected:";
        for (const auto& v : chk.violations) msg += " " + v + ";";
        throw Error(Error::Kind::InvalidCut, msg);
    }

    std::unordered_set<std::string> om(c.omega.begin(), c.omega.end());
    std::unordered_set<std::string> th(c.theta.begin(), c.theta.end());

    BoundReport rep;
    rep.dof = net.mode == LayeredNetwork::Mode::Generic;

    CutPair canon;
    for (const auto& layer : net.layers)
        for (const auto& n : layer) {
            if (om.count(n)) canon.omega.push_back(n);
            if (th.count(n)) canon.theta.push_back(n);
        }

    for (int t = 0; t + 1 < net.num_layers(); ++t) {
        std::vector<int> cols_om, cols_th, rows_omc, rows_thc;
        for (int i = 0; i < static_cast<int>(net.layers[t].size()); ++i) {
            if (om.count(net.layers[t][i])) cols_om.push_back(i);
            if (th.count(net.layers[t][i])) cols_th.push_back(i);
        }
        for (int i = 0; i < static_cast<int>(net.layers[t + 1].size()); ++i) {
            if (!om.count(net.layers[t + 1][i])) rows_omc.push_back(i);
            if (!th.count(net.layers[t + 1][i])) rows_thc.push_back(i);
        }
        TermBreakdown tb;
        tb.layer = t;
        tb.rank_omega = sub_rank(net, t, rows_omc, cols_om);
        tb.rank_theta = sub_rank(net, t, rows_thc, cols_th);
        tb.rank_cross = sub_rank(net, t, rows_omc, cols_th);
        rep.value += tb.value();
        rep.terms.push_back(tb);
    }
    rep.witness = canon;
    return rep;
}

BoundReport classic_cutset(const LayeredNetwork& net, const Limits& lim) {
    net.validate();
    check_widths(net, lim);
    const int r = net.num_layers();

    std::vector<std::vector<std::pair<Mask, Mask>>> states(r);
    states[0] = {{(1u << net.layers[0].size()) - 1, 0}};
    states[r - 1] = {{0, 0}};
    for (int t = 1; t + 1 < r; ++t) {
        const Mask full = (1u << net.layers[t].size()) - 1;
        for (Mask om = 0;; ++om) {
            states[t].emplace_back(om, 0);
            if (om == full) break;
        }
    }

    std::uint64_t work = 0;
    for (int t = 0; t + 1 < r; ++t)
        work += static_cast<std::uint64_t>(states[t].size()) * states[t + 1].size();
    if (work > lim.max_transitions)
        throw too_large("single-cut search needs " + std::to_string(work) +
                        " transitions, over the budget of " +
                        std::to_string(lim.max_transitions));

    SearchStats stats;
    stats.candidates = 1;
    RankCache cache(net);
    DpOutcome out = run_layer_dp(net, cache, states, stats);

    BoundReport rep = eval_pair_bound(net, {mask_nodes(net, out.omega), {}});
    if (rep.value != out.value)
        throw std::logic_error("single-cut value disagrees with its witness");
    rep.stats = stats;
    return rep;
}

BoundReport search_pair_bound(const LayeredNetwork& net, const Limits& lim) {
    net.validate();
    check_widths(net, lim);
    const int r = net.num_layers();
    const int K = net.K;

    std::vector<std::vector<std::pair<Mask, Mask>>> states(r);
    for (int t = 1; t + 1 < r; ++t)
        states[t] = pair_states(static_cast<int>(net.layers[t].size()));

    std::uint64_t work_once = 0;
    {
        std::vector<std::uint64_t> sizes(r, 1);
        for (int t = 1; t + 1 < r; ++t) sizes[t] = states[t].size();
        for (int t = 0; t + 1 < r; ++t) work_once += sizes[t] * sizes[t + 1];
    }
    const std::uint64_t work = work_once << K;
    if (work >> K != work_once || work > lim.max_transitions)
        throw too_large("two-level search needs " + std::to_string(work_once) + " x 2^" +
                        std::to_string(K) + " transitions, over the budget of " +
                        std::to_string(lim.max_transitions) +
                        "; raise NETBOUND_LIMITS, use generic mode, or evaluate a handpicked cut");

    SearchStats stats;
    RankCache cache(net);
    const Mask full0 = (1u << net.layers[0].size()) - 1;

    bool have_best = false;
    DpOutcome best;
    for (Mask t_mask = 0; t_mask < (1u << K); ++t_mask) {
        ++stats.candidates;
        states[0] = {{full0, t_mask}};
        states[r - 1] = {{t_mask, 0}};
        DpOutcome out = run_layer_dp(net, cache, states, stats);
        if (!have_best || out.value < best.value ||
            (out.value == best.value && out.encoding < best.encoding)) {
            have_best = true;
            best = std::move(out);
        }
    }

    BoundReport rep =
        eval_pair_bound(net, {mask_nodes(net, best.omega), mask_nodes(net, best.theta)});
    if (rep.value != best.value)
        throw std::logic_error("two-level search value disagrees with its witness");
    rep.stats = stats;
    return rep;
}

std::string report_to_json_text(const BoundReport& r) {
    ordered_json j;
    const auto* edge_witness = std::get_if<EdgeSetWitness>(&r.witness);
    if (edge_witness && !edge_witness->found)
        j["bound"] = nullptr;
    else
        j["bound"] = r.value;
    j["units"] = r.dof ? "dof" : "log|F|";

    ordered_json w;
    if (const auto* cut = std::get_if<CutPair>(&r.witness)) {
        w["omega"] = cut->omega;
        w["theta"] = cut->theta;
    } else if (const auto* chain = std::get_if<CutChain>(&r.witness)) {
        w["cuts"] = chain->cuts;
    } else if (edge_witness) {
        w["found"] = edge_witness->found;
        ordered_json edges = ordered_json::array();
        for (const auto& [u, v] : edge_witness->edge_names) edges.push_back({u, v});
        w["edges"] = edges;
        w["ell"] = edge_witness->ell;
    }
    j["witness"] = w;

    ordered_json terms = ordered_json::array();
    for (const auto& t : r.terms) {
        ordered_json jt;
        jt["layer"] = t.layer;
        jt["rank_omega"] = t.rank_omega;
        jt["rank_theta"] = t.rank_theta;
        jt["rank_cross"] = t.rank_cross;
        jt["value"] = t.value();
        terms.push_back(jt);
    }
    j["terms"] = terms;
    j["stats"] = {{"states_explored", r.stats.states_explored},
                  {"states_pruned", r.stats.states_pruned},
                  {"candidates", r.stats.candidates}};
    return j.dump(2) + "\n";
}

std::string cut_to_dot(const LayeredNetwork& net, const CutPair& c) {
    net.validate();
    CutCheck chk = validate_cut_pair(net, c);
    if (!chk.ok) throw Error(Error::Kind::InvalidCut, "cut pair rejected");
    std::unordered_set<std::string> om(c.omega.begin(), c.omega.end());
    std::unordered_set<std::string> th(c.theta.begin(), c.theta.end());

    std::string dot = "digraph cut {\n  rankdir=LR;\n  node [style=filled];\n";
    for (const auto& layer : net.layers)
        for (const auto& n : layer) {
            const char* color = th.count(n) ? "gold" : om.count(n) ? "lightblue" : "lightgray";
            dot += "  \"" + n + "\" [fillcolor=" + color + "];\n";
        }
    for (int t = 0; t + 1 < net.num_layers(); ++t)
        for (int r2 = 0; r2 < net.supports[t].rows; ++r2)
            for (int c2 = 0; c2 < net.supports[t].cols; ++c2) {
                if (!net.supports[t].at(r2, c2)) continue;
                const std::string& tail = net.layers[t][c2];
                const std::string& head = net.layers[t + 1][r2];
                dot += "  \"" + tail + "\" -> \"" + head + "\"";
                if (om.count(tail) && !om.count(head)) dot += " [style=dashed]";
                dot += ";\n";
            }
    dot += "}\n";
    return dot;
}

}  // namespace netbound
