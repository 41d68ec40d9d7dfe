#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "netbound/exactalg.hpp"

namespace netbound {

// A K-unicast layered network. Layer 0 holds the K sources and the last
// layer the K destinations, paired up by position. Hop j is the transfer
// matrix from the transmit vector of layer j to the receive vector of
// layer j+1, stored receiver-major: row i of hop j belongs to node i of
// layer j+1. Sources receive nothing and destinations transmit nothing;
// the layered shape encodes that on its own.
//
// In generic mode only the support patterns carry meaning and every rank
// taken by the bound engines is a generic (matching) rank. The matrices
// then hold the 0/1 incarnation of the supports so both modes share one
// representation.
struct LayeredNetwork {
    enum class Mode { Explicit, Generic };

    FieldSpec field;
    std::vector<std::vector<std::string>> layers;
    std::vector<ExactMatrix> hops;
    std::vector<SupportPattern> supports;
    int K = 0;
    Mode mode = Mode::Explicit;

    int num_layers() const { return static_cast<int>(layers.size()); }
    const std::vector<std::string>& sources() const { return layers.front(); }
    const std::vector<std::string>& destinations() const { return layers.back(); }

    bool has_node(const std::string& name) const;
    // (layer, position) of a node; throws UnknownNode
    std::pair<int, int> locate(const std::string& name) const;

    // throws SchemaError naming the first violated shape rule
    void validate() const;

    bool operator==(const LayeredNetwork& o) const;
};

// Three-layer K-pair network with one relay row per pair: sources feed
// relays through F1 and relays feed destinations through F2. Entry (i,j)
// of either matrix is the gain from transmitter j to receiver i.
struct KkkNetwork {
    int K = 0;
    FieldSpec field;
    ExactMatrix F1, F2;
    SupportPattern support1, support2;
    LayeredNetwork::Mode mode = LayeredNetwork::Mode::Explicit;

    static KkkNetwork from_layered(const LayeredNetwork& net);
    LayeredNetwork to_layered() const;
};

// Unit-capacity directed acyclic graph with K (source, destination)
// pairs; capacities are all one symbol per use.
struct WirelineNetwork {
    std::vector<std::string> nodes;
    std::vector<std::pair<std::string, std::string>> edges;
    std::vector<std::pair<std::string, std::string>> pairs;

    void validate() const;
    int node_index(const std::string& name) const;  // throws UnknownNode

    bool operator==(const WirelineNetwork& o) const;
};

// One two-level cut: omega is the outer node set, theta the inner one.
struct CutPair {
    std::vector<std::string> omega;
    std::vector<std::string> theta;
};

// A nested family of cuts, outermost first.
struct CutChain {
    std::vector<std::vector<std::string>> cuts;
};

struct CutCheck {
    bool ok = false;
    std::vector<std::string> violations;
};

// Checks the admission rules for a two-level cut: sources inside omega,
// theta inside omega with no destinations, and for every pair i the
// destination d_i lies in omega exactly when the source s_i lies in
// theta. Unknown node names throw; rule failures are returned.
CutCheck validate_cut_pair(const LayeredNetwork& net, const CutPair& c);

// Same admission style for a chain: each cut contains the next, sources
// sit in the first cut, no destination survives to the last, and pair
// coupling links consecutive cuts (with the whole node set before the
// first and the empty set after the last).
CutCheck validate_cut_chain(const LayeredNetwork& net, const CutChain& chain);

// Chains ell copies end to end, identifying each destination with the
// matching source of the next copy. Names gain an "@<copy>" suffix and a
// glued node keeps its source-side name.
LayeredNetwork concatenate(const LayeredNetwork& net, int ell);
WirelineNetwork concatenate(const WirelineNetwork& net, int ell);

// Joint probability table over named discrete variables. States are
// indexed in odometer order with the last variable moving fastest.
struct TinyJointDistribution {
    std::vector<std::string> names;
    std::vector<int> sizes;
    std::vector<mpq_class> p;

    std::size_t num_states() const;
    std::size_t state_index(const std::vector<int>& values) const;

    static TinyJointDistribution uniform(std::vector<std::string> names, std::vector<int> sizes);
    // normalizes arbitrary nonnegative weights to a distribution
    static TinyJointDistribution from_weights(std::vector<std::string> names,
                                              std::vector<int> sizes,
                                              std::vector<mpq_class> weights);

    void validate() const;
};

using AnyNetwork = std::variant<LayeredNetwork, WirelineNetwork>;

AnyNetwork load_network(const std::string& path);
void save_network(const AnyNetwork& net, const std::string& path);

// JSON bridge used by both the file format and the command line
AnyNetwork network_from_json_text(const std::string& text, const std::string& origin);
std::string network_to_json_text(const AnyNetwork& net);

}  // namespace netbound
