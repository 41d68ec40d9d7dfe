#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "netbound/netmodel.hpp"

namespace netbound {

// Per-hop pieces of a two-level cut value. rank_omega counts what
// leaves the outer set across this hop, rank_theta what leaves the
// inner set, and rank_cross the overlap that both already paid for.
struct TermBreakdown {
    int layer = 0;
    int rank_omega = 0;
    int rank_theta = 0;
    int rank_cross = 0;
    int value() const { return rank_omega + rank_theta - rank_cross; }
};

struct SearchStats {
    std::uint64_t states_explored = 0;
    std::uint64_t states_pruned = 0;
    std::uint64_t candidates = 0;
};

// Result of the edge-cut search: base-network edge indices, the copy
// count the disconnection was shown at, and whether anything qualified
// within the size limit.
struct EdgeSetWitness {
    bool found = false;
    std::vector<int> edges;
    std::vector<std::pair<std::string, std::string>> edge_names;
    int ell = 1;
};

struct BoundReport {
    int value = 0;
    bool dof = false;  // generic-mode value, counted in matchings
    std::variant<CutPair, CutChain, EdgeSetWitness> witness;
    std::vector<TermBreakdown> terms;
    SearchStats stats;
};

// Search ceilings. The width cap bounds per-layer state spaces, the
// work cap bounds the number of DP transitions evaluated across the
// whole search. Overridable through the NETBOUND_LIMITS environment
// variable, e.g. "width=14,states=100000000".
struct Limits {
    int max_layer_width = 12;
    std::uint64_t max_transitions = 50000000;

    static Limits from_env(const char* text);
};

// Minimum over single cuts that keep every source and exclude every
// destination of the summed crossing ranks, one rank per hop.
BoundReport classic_cutset(const LayeredNetwork& net, const Limits& lim = {});

// Value of one admissible two-level cut, with the per-hop breakdown.
BoundReport eval_pair_bound(const LayeredNetwork& net, const CutPair& c);

// Minimum of eval_pair_bound over every admissible two-level cut, by
// dynamic programming across layers. Ties go to the lexicographically
// smallest cut encoding.
BoundReport search_pair_bound(const LayeredNetwork& net, const Limits& lim = {});

// Smallest edge set whose removal from every copy of the chained
// network cuts all copy-1 sources off from all last-copy destinations.
// Subsets are tried smallest first, then in index order, and each is
// checked at copy counts 1..ell in turn.
BoundReport gns_bound(const WirelineNetwork& net, int ell, int max_set_size);

// Re-runs the reachability check behind gns_bound for a given edge set.
bool gns_witness_disconnects(const WirelineNetwork& net, const std::vector<int>& edges, int ell);

std::string report_to_json_text(const BoundReport& r);

// Witness rendering for graph viewers: membership by fill color, cut
// crossings dashed.
std::string cut_to_dot(const LayeredNetwork& net, const CutPair& c);

}  // namespace netbound
