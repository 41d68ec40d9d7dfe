#include <algorithm>
#include <queue>

#include "netbound/bounds.hpp"
#include "netbound/error.hpp"

namespace netbound {

namespace {

struct Indexed {
    int n = 0;
    std::vector<std::vector<std::pair<int, int>>> out;  // node -> (edge index, head)
    std::vector<int> sources;                           // per pair
    std::vector<int> glue;                              // node -> pair index when it is a destination
};

Indexed index_graph(const WirelineNetwork& net) {
    Indexed g;
    g.n = static_cast<int>(net.nodes.size());
    g.out.resize(g.n);
    for (int e = 0; e < static_cast<int>(net.edges.size()); ++e)
        g.out[net.node_index(net.edges[e].first)].emplace_back(
            e, net.node_index(net.edges[e].second));
    g.glue.assign(g.n, -1);
    for (int k = 0; k < static_cast<int>(net.pairs.size()); ++k) {
        g.sources.push_back(net.node_index(net.pairs[k].first));
        g.glue[net.node_index(net.pairs[k].second)] = k;
    }
    return g;
}

// true when, with the marked edges deleted from every copy, no copy-1
// source can reach any last-copy destination; walks (copy, node) states
// and hops copies at glued destinations
bool disconnects(const Indexed& g, const std::vector<char>& removed, int ell,
                 std::uint64_t* visited_count) {
    std::vector<char> seen(static_cast<std::size_t>(g.n) * ell, 0);
    std::queue<int> q;
    auto visit = [&](int copy, int node) {
        const std::size_t id = static_cast<std::size_t>(copy) * g.n + node;
        if (seen[id]) return false;
        seen[id] = 1;
        q.push(static_cast<int>(id));
        return true;
    };
    for (int s : g.sources) visit(0, s);
    bool reached = false;
    while (!q.empty() && !reached) {
        const int id = q.front();
        q.pop();
        if (visited_count) ++*visited_count;
        const int copy = id / g.n;
        const int node = id % g.n;
        if (g.glue[node] >= 0) {
            if (copy + 1 < ell)
                visit(copy + 1, g.sources[g.glue[node]]);
            else
                reached = true;
        }
        for (const auto& [e, head] : g.out[node])
            if (!removed[e]) visit(copy, head);
    }
    return !reached;
}

}  // namespace

bool gns_witness_disconnects(const WirelineNetwork& net, const std::vector<int>& edges, int ell) {
    net.validate();
    if (ell < 1) throw Error(Error::Kind::InvalidInput, "copy count must be at least 1");
    std::vector<char> removed(net.edges.size(), 0);
    for (int e : edges) {
        if (e < 0 || e >= static_cast<int>(net.edges.size()))
            throw Error(Error::Kind::IndexOutOfRange, "edge index out of range");
        removed[e] = 1;
    }
    return disconnects(index_graph(net), removed, ell, nullptr);
}

BoundReport gns_bound(const WirelineNetwork& net, int ell, int max_set_size) {
    net.validate();
    if (ell < 1) throw Error(Error::Kind::InvalidInput, "copy count must be at least 1");
    if (max_set_size < 0)
        throw Error(Error::Kind::InvalidInput, "edge budget must be nonnegative");

    const Indexed g = index_graph(net);
    const int E = static_cast<int>(net.edges.size());
    const int cap = std::min(max_set_size, E);

    BoundReport rep;
    std::vector<char> removed(E, 0);

    // subsets by size, then in index order; each tried at every copy
    // count before moving on
    for (int m = 0; m <= cap; ++m) {
        std::vector<int> pick(m);
        for (int i = 0; i < m; ++i) pick[i] = i;
        for (;;) {
            ++rep.stats.candidates;
            std::fill(removed.begin(), removed.end(), 0);
            for (int e : pick) removed[e] = 1;
            for (int l = 1; l <= ell; ++l) {
                if (disconnects(g, removed, l, &rep.stats.states_explored)) {
                    EdgeSetWitness w;
                    w.found = true;
                    w.edges = pick;
                    for (int e : pick) w.edge_names.push_back(net.edges[e]);
                    w.ell = l;
                    rep.value = m;
                    rep.witness = w;
                    return rep;
                }
            }
            // next combination
            int i = m - 1;
            while (i >= 0 && pick[i] == E - m + i) --i;
            if (i < 0) break;
            ++pick[i];
            for (int j = i + 1; j < m; ++j) pick[j] = pick[j - 1] + 1;
        }
    }

    EdgeSetWitness none;
    none.found = false;
    rep.value = 0;
    rep.witness = none;
    return rep;
}

}  // namespace netbound
